#ifndef IMLAB_SWEEP_HPP
#define IMLAB_SWEEP_HPP

#include <string>

namespace imlab {

// Runs the cartesian experiment matrix described by a JSON config file and
// writes one run directory per cell plus an aggregate.csv of median
// frames-to-threshold values.  Cells whose summary.json already exists are
// skipped, so an interrupted sweep can be resumed.  Returns the number of
// runs that failed.
int run_sweep(const std::string& config_path);

}  // namespace imlab

#endif  // IMLAB_SWEEP_HPP

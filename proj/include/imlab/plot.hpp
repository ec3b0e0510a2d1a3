#ifndef IMLAB_PLOT_HPP
#define IMLAB_PLOT_HPP

#include <string>
#include <vector>

namespace imlab {

struct Curve {
  std::vector<double> frames;
  std::vector<double> values;
};

// Reads frames/return100 columns from a progress.csv.
Curve read_progress_csv(const std::string& path);

// Mean +/- std band of return-vs-frames across runs, resampled to the
// coarsest frame grid, with horizontal reference lines at the optimal and
// 95%-of-optimal scores when optimal > 0.  Writes an SVG file.
void write_curve_svg(const std::vector<std::string>& csv_paths, const std::string& out_path,
                     double optimal, const std::string& title = "");

}  // namespace imlab

#endif  // IMLAB_PLOT_HPP

#include "imlab/plot.hpp"

#include "imlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace imlab {

Curve read_progress_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open csv: " + path);
  Curve c;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (first) {  // header
      first = false;
      continue;
    }
    if (line.empty()) continue;
    const auto rec = parse_run_record(line);
    if (!rec) throw std::runtime_error("malformed csv row in " + path + ": " + line);
    c.frames.push_back(static_cast<double>(rec->frames));
    c.values.push_back(rec->return100);
  }
  return c;
}

namespace {

double interp(const Curve& c, double x) {
  if (c.frames.empty()) return 0;
  if (x <= c.frames.front()) return c.values.front();
  if (x >= c.frames.back()) return c.values.back();
  const auto it = std::lower_bound(c.frames.begin(), c.frames.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - c.frames.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - c.frames[lo]) / (c.frames[hi] - c.frames[lo]);
  return c.values[lo] + t * (c.values[hi] - c.values[lo]);
}

double grid_step(const Curve& c) {
  double s = 0;
  for (std::size_t i = 1; i < c.frames.size(); ++i) s = std::max(s, c.frames[i] - c.frames[i - 1]);
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_curve_svg(const std::vector<std::string>& csv_paths, const std::string& out_path,
                     double optimal, const std::string& title) {
  if (csv_paths.empty()) throw std::invalid_argument("plot: need at least one csv file");
  std::vector<Curve> curves;
  for (const auto& p : csv_paths) {
    Curve c = read_progress_csv(p);
    if (c.frames.empty()) throw std::runtime_error("plot: empty csv: " + p);
    curves.push_back(std::move(c));
  }

  // Resample every run onto the grid of the coarsest one, clipped to the
  // range all runs cover.
  std::size_t coarse = 0;
  for (std::size_t i = 1; i < curves.size(); ++i)
    if (grid_step(curves[i]) > grid_step(curves[coarse])) coarse = i;
  double x_max = curves[0].frames.back();
  for (const auto& c : curves) x_max = std::min(x_max, c.frames.back());
  std::vector<double> grid;
  for (double x : curves[coarse].frames)
    if (x <= x_max) grid.push_back(x);
  if (grid.empty()) grid.push_back(x_max);

  std::vector<double> mean(grid.size(), 0.0), sd(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double m = 0;
    for (const auto& c : curves) m += interp(c, grid[g]);
    m /= static_cast<double>(curves.size());
    double v = 0;
    for (const auto& c : curves) {
      const double d = interp(c, grid[g]) - m;
      v += d * d;
    }
    mean[g] = m;
    sd[g] = std::sqrt(v / static_cast<double>(curves.size()));
  }

  const double w = 860, h = 520, ml = 70, mr = 20, mt = 36, mb = 52;
  const double pw = w - ml - mr, ph = h - mt - mb;
  double y_top = optimal > 0 ? 1.05 * optimal : 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) y_top = std::max(y_top, mean[g] + sd[g]);
  y_top = std::max(y_top, 1e-6) * 1.02;
  const double x_lo = grid.front(), x_hi = std::max(grid.back(), x_lo + 1.0);

  auto px = [&](double x) { return ml + pw * (x - x_lo) / (x_hi - x_lo); };
  auto py = [&](double y) { return mt + ph * (1.0 - y / y_top); };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
  svg << "<rect width='" << w << "' height='" << h << "' fill='white'/>\n";
  if (!title.empty())
    svg << "<text x='" << w / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";

  // axes
  svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  svg << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 5.0;
    svg << "<text x='" << px(xv) << "' y='" << h - 22
        << "' text-anchor='middle' font-size='11'>" << fmt(xv / 1e6) << "e6</text>\n";
    const double yv = y_top * k / 5.0;
    svg << "<text x='" << ml - 8 << "' y='" << py(yv) + 4
        << "' text-anchor='end' font-size='11'>" << fmt(yv) << "</text>\n";
  }
  svg << "<text x='" << ml + pw / 2 << "' y='" << h - 6
      << "' text-anchor='middle' font-size='12'>frames</text>\n";
  svg << "<text x='16' y='" << mt + ph / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << mt + ph / 2
      << ")'>mean return (last 100 episodes)</text>\n";

  // std band (only meaningful with several runs)
  if (curves.size() > 1) {
    svg << "<polygon fill='#4477aa' fill-opacity='0.25' stroke='none' points='";
    for (std::size_t g = 0; g < grid.size(); ++g)
      svg << px(grid[g]) << "," << py(std::min(y_top, mean[g] + sd[g])) << " ";
    for (std::size_t g = grid.size(); g-- > 0;)
      svg << px(grid[g]) << "," << py(std::max(0.0, mean[g] - sd[g])) << " ";
    svg << "'/>\n";
  }

  // mean line
  svg << "<polyline fill='none' stroke='#4477aa' stroke-width='2' points='";
  for (std::size_t g = 0; g < grid.size(); ++g) svg << px(grid[g]) << "," << py(mean[g]) << " ";
  svg << "'/>\n";

  // optimal (black) and 95%-suboptimal (brown) reference lines
  if (optimal > 0) {
    svg << "<line x1='" << ml << "' y1='" << py(optimal) << "' x2='" << ml + pw << "' y2='"
        << py(optimal) << "' stroke='black' stroke-dasharray='6,3'/>\n";
    svg << "<line x1='" << ml << "' y1='" << py(0.95 * optimal) << "' x2='" << ml + pw
        << "' y2='" << py(0.95 * optimal) << "' stroke='#8b4513' stroke-dasharray='6,3'/>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write: " + out_path);
  out << svg.str();
}

}  // namespace imlab

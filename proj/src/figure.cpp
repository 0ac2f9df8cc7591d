#include "panelcf/figure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace panelcf {

YearBand band_from_bootstrap(const GapSeries& gaps, int treatment_year,
                             double att, double ci_lower, double ci_upper) {
  YearBand band;
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < gaps.years.size(); ++i) {
    if (gaps.years[i] < treatment_year) continue;
    double g = gaps.gap(static_cast<Index>(i));
    band.years.push_back(gaps.years[i]);
    lo.push_back(g - (att - ci_lower));
    hi.push_back(g + (ci_upper - att));
  }
  band.lower = Eigen::Map<Vectord>(lo.data(), static_cast<Index>(lo.size()));
  band.upper = Eigen::Map<Vectord>(hi.data(), static_cast<Index>(hi.size()));
  return band;
}

namespace {

struct Scale {
  double x0, x1, y0, y1;  // data range
  double width = 720, height = 420;
  double ml = 60, mr = 15, mt = 15, mb = 40;

  double px(double x) const {
    return ml + (x - x0) / (x1 - x0) * (width - ml - mr);
  }
  double py(double y) const {
    return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb);
  }
};

std::string polyline(const Scale& s, const std::vector<int>& years,
                     const Vectord& v) {
  std::string pts;
  char buf[64];
  for (std::size_t i = 0; i < years.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", s.px(years[i]),
                  s.py(v(static_cast<Index>(i))));
    pts += buf;
  }
  return pts;
}

}  // namespace

void emit_gap_figure(const GapSeries& gaps, const YearBand& band,
                     int treatment_year, const std::string& svg_path,
                     const std::string& data_path) {
  if (band.lower.size() != band.upper.size() ||
      static_cast<std::size_t>(band.lower.size()) != band.years.size()) {
    throw std::invalid_argument("gap figure: band lengths disagree");
  }
  std::map<int, std::size_t> year_pos;
  for (std::size_t i = 0; i < gaps.years.size(); ++i) year_pos[gaps.years[i]] = i;
  for (int y : band.years) {
    if (!year_pos.count(y)) {
      throw std::invalid_argument("gap figure: band year " + std::to_string(y) +
                                  " not in gap series");
    }
  }

  // band around the synthetic line, in outcome units
  std::vector<double> band_lo_outcome(band.years.size()),
      band_hi_outcome(band.years.size());
  for (std::size_t i = 0; i < band.years.size(); ++i) {
    double synth = gaps.synthetic(static_cast<Index>(year_pos[band.years[i]]));
    // a gap band [lo, hi] translates to observed-space limits synth + lo/hi
    band_lo_outcome[i] = synth + band.lower(static_cast<Index>(i));
    band_hi_outcome[i] = synth + band.upper(static_cast<Index>(i));
  }

  double ymin = std::min(gaps.observed.minCoeff(), gaps.synthetic.minCoeff());
  double ymax = std::max(gaps.observed.maxCoeff(), gaps.synthetic.maxCoeff());
  for (double v : band_lo_outcome) ymin = std::min(ymin, v);
  for (double v : band_hi_outcome) ymax = std::max(ymax, v);
  double pad = (ymax - ymin) * 0.05;
  if (pad == 0) pad = 1.0;

  Scale s{static_cast<double>(gaps.years.front()),
          static_cast<double>(gaps.years.back()), ymin - pad, ymax + pad};
  if (s.x1 == s.x0) s.x1 = s.x0 + 1;

  std::ofstream svg(svg_path);
  if (!svg) throw std::invalid_argument("cannot write '" + svg_path + "'");
  char buf[256];
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << s.width
      << "' height='" << s.height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";

  // axes
  std::snprintf(buf, sizeof(buf),
                "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='black'/>\n",
                s.ml, s.height - s.mb, s.width - s.mr, s.height - s.mb);
  svg << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='black'/>\n",
                s.ml, s.mt, s.ml, s.height - s.mb);
  svg << buf;
  for (int y = gaps.years.front(); y <= gaps.years.back(); y += 5) {
    std::snprintf(buf, sizeof(buf),
                  "<text x='%.1f' y='%.1f' font-size='11' text-anchor='middle'>%d</text>\n",
                  s.px(y), s.height - s.mb + 16, y);
    svg << buf;
  }
  for (int tick = 0; tick <= 4; ++tick) {
    double v = s.y0 + (s.y1 - s.y0) * tick / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x='%.1f' y='%.1f' font-size='11' text-anchor='end'>%.3g</text>\n",
                  s.ml - 6, s.py(v) + 4, v);
    svg << buf;
  }

  // confidence band (single post year degenerates to a marker-width strip)
  if (!band.years.empty()) {
    if (band.years.size() == 1) {
      std::snprintf(buf, sizeof(buf),
                    "<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' "
                    "stroke='#9ecae1' stroke-width='6' opacity='0.7'/>\n",
                    s.px(band.years[0]), s.py(band_lo_outcome[0]),
                    s.px(band.years[0]), s.py(band_hi_outcome[0]));
      svg << buf;
    } else {
      std::string pts;
      for (std::size_t i = 0; i < band.years.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", s.px(band.years[i]),
                      s.py(band_hi_outcome[i]));
        pts += buf;
      }
      for (std::size_t i = band.years.size(); i-- > 0;) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", s.px(band.years[i]),
                      s.py(band_lo_outcome[i]));
        pts += buf;
      }
      svg << "<polygon points='" << pts << "' fill='#9ecae1' opacity='0.6'/>\n";
    }
  }

  // treatment-year rule
  std::snprintf(buf, sizeof(buf),
                "<line x1='%.2f' y1='%.1f' x2='%.2f' y2='%.1f' stroke='gray' "
                "stroke-dasharray='4,3'/>\n",
                s.px(treatment_year), s.mt, s.px(treatment_year), s.height - s.mb);
  svg << buf;

  svg << "<polyline points='" << polyline(s, gaps.years, gaps.observed)
      << "' fill='none' stroke='black' stroke-width='1.5'/>\n";
  svg << "<polyline points='" << polyline(s, gaps.years, gaps.synthetic)
      << "' fill='none' stroke='#d62728' stroke-width='1.5' "
         "stroke-dasharray='6,3'/>\n";
  svg << "<text x='" << s.ml + 8 << "' y='" << s.mt + 14
      << "' font-size='12'>observed (solid), synthetic (dashed)</text>\n";
  svg << "</svg>\n";

  std::ofstream data(data_path);
  if (!data) throw std::invalid_argument("cannot write '" + data_path + "'");
  data << "year,observed,synthetic,gap,band_lower,band_upper\n";
  for (std::size_t i = 0; i < gaps.years.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g", gaps.years[i],
                  gaps.observed(static_cast<Index>(i)),
                  gaps.synthetic(static_cast<Index>(i)),
                  gaps.gap(static_cast<Index>(i)));
    data << buf;
    auto it = std::find(band.years.begin(), band.years.end(), gaps.years[i]);
    if (it != band.years.end()) {
      Index b = static_cast<Index>(it - band.years.begin());
      std::snprintf(buf, sizeof(buf), ",%.10g,%.10g", band.lower(b), band.upper(b));
      data << buf;
    } else {
      data << ",,";
    }
    data << '\n';
  }
}

}  // namespace panelcf

#pragma once

// Text emitters: CSV tables, JSON reports and SVG plots. Floating-point
// values in CSV and SVG use 17 significant digits; JSON numbers use the
// shortest round-trip form. Output depends only on the inputs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "flockstab/conditions.hpp"
#include "flockstab/rootcurves.hpp"
#include "flockstab/simulation.hpp"
#include "flockstab/spectral.hpp"

namespace flockstab {

using ojson = nlohmann::ordered_json;

inline std::string num(double v) { return fmt::format("{:.17g}", v); }

// ---- CSV -------------------------------------------------------------------

inline std::string spectrum_csv(std::span<const ModeSpectrum> spectra) {
  std::string out = "m,phi,re,im,residual\n";
  for (const ModeSpectrum& ms : spectra)
    for (std::size_t i = 0; i < ms.eigenvalues.size(); ++i)
      out += fmt::format("{},{},{},{},{}\n", ms.mode, num(ms.phi), num(ms.eigenvalues[i].real()),
                         num(ms.eigenvalues[i].imag()), num(ms.residuals[i]));
  return out;
}

inline std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t";
  for (int k = 1; k <= tr.agent_count; ++k) out += fmt::format(",z_{}", k);
  for (int k = 1; k <= tr.agent_count; ++k) out += fmt::format(",v_{}", k);
  out += '\n';
  for (std::size_t i = 0; i < tr.samples(); ++i) {
    out += num(tr.times[i]);
    for (double z : tr.z(i)) (out += ',') += num(z);
    for (double v : tr.v(i)) (out += ',') += num(v);
    out += '\n';
  }
  return out;
}

inline std::string rootcurves_csv(const BranchTracking& bt) {
  std::string out = "t,branch,re,im,predicted_re,predicted_im,ratio\n";
  for (const RootCurve* curve : {&bt.plus, &bt.minus}) {
    const std::vector<double> ratios = tangency_ratios(*curve, bt.c);
    for (std::size_t i = 0; i < curve->roots.size(); ++i) {
      const cplx pred = curve->sign() * std::sqrt(bt.c * curve->t_grid[i]);
      out += fmt::format("{},{},{},{},{},{},{}\n", num(curve->t_grid[i]), to_string(curve->branch),
                         num(curve->roots[i].real()), num(curve->roots[i].imag()), num(pred.real()),
                         num(pred.imag()), num(ratios[i]));
    }
  }
  return out;
}

inline std::string scan_csv(const ScanResult& scan) {
  std::string out = "N,censored,magnitude,log_magnitude,time_at_extremum,blowup_time\n";
  for (const ScanPoint& p : scan.points)
    out += fmt::format("{},{},{},{},{},{}\n", p.N, p.censored ? 1 : 0, num(p.magnitude),
                       num(p.log_magnitude), num(p.time_at_extremum),
                       p.blowup_time ? num(*p.blowup_time) : std::string());
  return out;
}

// ---- JSON ------------------------------------------------------------------

inline ojson to_json(const ConditionReport& r) {
  ojson j;
  j["arrangement"] = std::string(to_string(r.arrangement));
  j["tolerance"] = r.tolerance;
  j["clauses"] = ojson::array();
  for (const ClauseResult& c : r.clauses)
    j["clauses"].push_back(
        {{"id", c.id}, {"value", c.value}, {"triggered", c.triggered}, {"description", c.description}});
  j["overall"] = std::string(to_string(r.overall));
  ojson q = ojson::object();
  for (const auto& [k, v] : r.quantities) q[k] = v;
  j["quantities"] = q;
  j["notes"] = r.notes;
  return j;
}

inline ojson to_json(const StabilityVerdict& v) {
  ojson j;
  j["status"] = std::string(to_string(v.status));
  j["zero_multiplicity"] = v.zero_multiplicity;
  j["zero_multiplicity_at_origin"] = v.zero_multiplicity_at_origin;
  j["geometric_multiplicity"] =
      v.geometric_multiplicity ? ojson(*v.geometric_multiplicity) : ojson(nullptr);
  j["max_real_part"] = std::isfinite(v.max_real_part) ? ojson(v.max_real_part) : ojson(nullptr);
  j["witness"] = {{"mode", v.witness_mode},
                  {"phi", v.witness_phi},
                  {"nu_re", v.witness_nu.real()},
                  {"nu_im", v.witness_nu.imag()}};
  j["tolerance"] = v.tolerance;
  if (v.a2_at_zero)
    j["a2_at_zero"] = {{"re", v.a2_at_zero->real()}, {"im", v.a2_at_zero->imag()}};
  return j;
}

inline ojson to_json(const TransientReport& r) {
  return {{"magnitude", r.magnitude},
          {"time_at_extremum", r.time_at_extremum},
          {"agent_at_extremum", r.agent_at_extremum + 1},
          {"tail_max_deviation", r.tail_max_deviation},
          {"converged", r.converged}};
}

inline ojson to_json(const ScanResult& s) {
  ojson j;
  j["points"] = ojson::array();
  for (const ScanPoint& p : s.points) {
    ojson pt = {{"N", p.N}, {"censored", p.censored}};
    if (p.censored) {
      pt["blowup_time"] = p.blowup_time ? ojson(*p.blowup_time) : ojson(nullptr);
    } else {
      pt["magnitude"] = p.magnitude;
      pt["log_magnitude"] = p.log_magnitude;
      pt["time_at_extremum"] = p.time_at_extremum;
    }
    j["points"].push_back(pt);
  }
  if (s.fit) {
    j["fit"] = {{"slope", s.fit->slope},
                {"intercept", s.fit->intercept},
                {"r_squared", s.fit->r_squared},
                {"residual_rms", s.fit->residual_rms},
                {"points", s.fit->points}};
  } else {
    j["fit"] = nullptr;
    j["fit_error"] = s.fit_error;
  }
  return j;
}

// ---- SVG -------------------------------------------------------------------

namespace detail {

struct Frame {
  double x0, x1, y0, y1;
  static constexpr double width = 720, height = 440, margin = 60;

  double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

inline Frame make_frame(double x0, double x1, double y0, double y1) {
  auto widen = [](double& lo, double& hi) {
    if (!(hi > lo)) {
      const double pad = std::max(1.0, std::abs(lo)) * 0.5;
      lo -= pad;
      hi += pad;
    }
  };
  widen(x0, x1);
  widen(y0, y1);
  return {x0, x1, y0, y1};
}

inline std::string svg_open(const Frame& f, std::string_view title, std::string_view xlabel,
                            std::string_view ylabel) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      Frame::width, Frame::height);
  const double l = Frame::margin, r = Frame::width - Frame::margin;
  const double t = Frame::margin, b = Frame::height - Frame::margin;
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                   l, t, r - l, b - t);
  s += fmt::format("<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
                   Frame::width / 2, title);
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                   Frame::width / 2, Frame::height - 15, xlabel);
  s += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" font-size=\"13\" "
      "transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      Frame::height / 2, ylabel);
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4, yv = f.y0 + (f.y1 - f.y0) * k / 4;
    s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{:.4g}</text>\n",
                     f.px(xv), b + 16, xv);
    s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"11\">{:.4g}</text>\n",
                     l - 4, f.py(yv) + 4, yv);
  }
  return s;
}

inline std::string polyline(const Frame& f, std::span<const double> xs, std::span<const double> ys,
                            std::string_view colour) {
  std::string s = fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"", colour);
  for (std::size_t i = 0; i < xs.size(); ++i)
    s += fmt::format("{:.2f},{:.2f} ", f.px(xs[i]), f.py(ys[i]));
  s += "\"/>\n";
  return s;
}

inline std::string_view palette(std::size_t i) {
  static constexpr std::string_view colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return colours[i % std::size(colours)];
}

}  // namespace detail

/// Leader-relative deviations z_k(t) - z_1(t), one polyline per sampled agent
/// (at most `max_agents`, evenly spaced along the line, last agent included).
inline std::string deviations_svg(const Trajectory& tr, std::string_view title, int max_agents = 40) {
  std::vector<int> agents;
  const int followers = tr.agent_count - 1;
  const int shown = std::min(followers, max_agents);
  for (int i = 0; i < shown; ++i) {
    const int p = shown == 1 ? followers : 1 + static_cast<int>(std::llround(
                                                   static_cast<double>(i) * (followers - 1) / (shown - 1)));
    if (agents.empty() || agents.back() != p) agents.push_back(p);
  }
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < tr.samples(); ++i) {
    const auto z = tr.z(i);
    for (int p : agents) {
      lo = std::min(lo, z[p] - z[0]);
      hi = std::max(hi, z[p] - z[0]);
    }
  }
  const double t_end = tr.times.empty() ? 1.0 : tr.times.back();
  const detail::Frame f = detail::make_frame(0.0, t_end, lo, hi);
  std::string s = detail::svg_open(f, title, "t", "deviation from leader");
  std::vector<double> ys(tr.samples());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (std::size_t i = 0; i < tr.samples(); ++i) ys[i] = tr.z(i)[agents[a]] - tr.z(i)[0];
    s += detail::polyline(f, tr.times, ys, detail::palette(a));
  }
  return s + "</svg>\n";
}

/// log|magnitude| against N with the fitted line.
inline std::string scan_svg(const ScanResult& scan, std::string_view title) {
  std::vector<double> xs, ys;
  for (const ScanPoint& p : scan.points)
    if (!p.censored && p.magnitude != 0.0) {
      xs.push_back(p.N);
      ys.push_back(p.log_magnitude);
    }
  if (xs.empty()) xs = {0.0}, ys = {0.0};
  const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
  const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
  const detail::Frame f = detail::make_frame(*xlo, *xhi, *ylo, *yhi);
  std::string s = detail::svg_open(f, title, "N", "log |magnitude|");
  for (std::size_t i = 0; i < xs.size(); ++i)
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#1f77b4\"/>\n", f.px(xs[i]),
                     f.py(ys[i]));
  if (scan.fit) {
    const double a = *xlo, b = *xhi;
    const double ends_x[] = {a, b};
    const double ends_y[] = {scan.fit->intercept + scan.fit->slope * a,
                             scan.fit->intercept + scan.fit->slope * b};
    s += detail::polyline(f, ends_x, ends_y, "#d62728");
  }
  return s + "</svg>\n";
}

/// Tracked branches in the complex plane against the predicted +-sqrt(ct).
inline std::string rootcurves_svg(const BranchTracking& bt, std::string_view title) {
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  auto extend = [&](cplx z) {
    lo_x = std::min(lo_x, z.real());
    hi_x = std::max(hi_x, z.real());
    lo_y = std::min(lo_y, z.imag());
    hi_y = std::max(hi_y, z.imag());
  };
  for (const RootCurve* c : {&bt.plus, &bt.minus})
    for (std::size_t i = 0; i < c->roots.size(); ++i) {
      extend(c->roots[i]);
      extend(c->sign() * std::sqrt(bt.c * c->t_grid[i]));
    }
  const detail::Frame f = detail::make_frame(lo_x, hi_x, lo_y, hi_y);
  std::string s = detail::svg_open(f, title, "Re", "Im");
  std::size_t colour = 0;
  for (const RootCurve* c : {&bt.plus, &bt.minus}) {
    std::vector<double> px, py;
    for (std::size_t i = 0; i < c->roots.size(); ++i) {
      const cplx pred = c->sign() * std::sqrt(bt.c * c->t_grid[i]);
      px.push_back(pred.real());
      py.push_back(pred.imag());
      s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n",
                       f.px(c->roots[i].real()), f.py(c->roots[i].imag()), detail::palette(colour));
    }
    s += detail::polyline(f, px, py, "#7f7f7f");
    ++colour;
  }
  return s + "</svg>\n";
}

}  // namespace flockstab

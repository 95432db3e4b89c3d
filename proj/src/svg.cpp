#include "pinlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pinlab {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Panel {
  double px, py, pw, ph;  // pixel box
  double x0, x1, y0, y1;  // data box

  double x(double v) const { return px + (v - x0) / (x1 - x0) * pw; }
  double y(double v) const { return py + ph - (v - y0) / (y1 - y0) * ph; }
};

void expand(double& lo, double& hi) {
  if (lo > hi) std::swap(lo, hi);
  double pad = (hi - lo) * 0.08;
  if (pad == 0) pad = 0.5;
  lo -= pad;
  hi += pad;
}

void line(std::string& s, double x1, double y1, double x2, double y2,
          const char* color, double width) {
  s += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
       "\" y2=\"" + fmt(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" +
       fmt(width) + "\"/>\n";
}

void text(std::string& s, double x, double y, const std::string& t,
          const char* anchor, int size) {
  s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-family=\"monospace\"" +
       " font-size=\"" + std::to_string(size) + "\" text-anchor=\"" + anchor +
       "\" fill=\"#222\">" + t + "</text>\n";
}

void frame(std::string& s, const Panel& p, const std::string& title,
           const std::string& xlabel, const std::string& ylabel) {
  s += "<rect x=\"" + fmt(p.px) + "\" y=\"" + fmt(p.py) + "\" width=\"" +
       fmt(p.pw) + "\" height=\"" + fmt(p.ph) +
       "\" fill=\"none\" stroke=\"#222\" stroke-width=\"1\"/>\n";
  text(s, p.px + p.pw / 2, p.py - 10, title, "middle", 14);
  text(s, p.px + p.pw / 2, p.py + p.ph + 34, xlabel, "middle", 12);
  text(s, p.px - 44, p.py + p.ph / 2, ylabel, "middle", 12);
}

void log_x_ticks(std::string& s, const Panel& p) {
  for (int e = static_cast<int>(std::ceil(p.x0));
       e <= static_cast<int>(std::floor(p.x1)); ++e) {
    const double x = p.x(e);
    line(s, x, p.py + p.ph, x, p.py + p.ph + 5, "#222", 1);
    text(s, x, p.py + p.ph + 18, "1e" + std::to_string(e), "middle", 11);
  }
}

void log_y_ticks(std::string& s, const Panel& p, int max_ticks) {
  int step = 1;
  while ((p.y1 - p.y0) / step > max_ticks) ++step;
  int first = static_cast<int>(std::ceil(p.y0));
  while (first % step != 0) ++first;
  for (int e = first; e <= static_cast<int>(std::floor(p.y1)); e += step) {
    const double y = p.y(e);
    line(s, p.px - 5, y, p.px, y, "#222", 1);
    text(s, p.px - 8, y + 4, "1e" + std::to_string(e), "end", 11);
  }
}

void lin_y_ticks(std::string& s, const Panel& p, int max_ticks) {
  int step = 1;
  while ((p.y1 - p.y0) / step > max_ticks) ++step;
  int first = static_cast<int>(std::ceil(p.y0));
  while (first % step != 0) ++first;
  for (int v = first; v <= static_cast<int>(std::floor(p.y1)); v += step) {
    const double y = p.y(v);
    line(s, p.px - 5, y, p.px, y, "#222", 1);
    text(s, p.px - 8, y + 4, std::to_string(v), "end", 11);
  }
}

}  // namespace

std::string sweep_svg(const std::vector<SweepPoint>& points) {
  struct P1 {
    double lx, ly, lylo, lyhi;
  };
  std::vector<P1> left;
  std::vector<std::pair<double, double>> right;
  for (const auto& pt : points) {
    if (!pt.ok || !(pt.kappa > 0)) continue;
    const double lx = std::log10(pt.kappa);
    if (pt.d_min > 0) {
      P1 r;
      r.lx = lx;
      r.ly = std::log10(pt.d_min);
      const double lo = std::max(pt.d_min - pt.error_bound, pt.d_min * 1e-3);
      const double hi = pt.d_min + pt.error_bound;
      r.lylo = std::log10(lo);
      r.lyhi = std::log10(hi);
      left.push_back(r);
    }
    if (std::isfinite(pt.q_overall)) right.emplace_back(lx, pt.q_overall);
  }

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"430\" "
       "viewBox=\"0 0 960 430\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"430\" fill=\"#ffffff\"/>\n";

  Panel pl{80, 50, 360, 300, 0, 1, 0, 1};
  Panel pr{570, 50, 360, 300, 0, 1, 0, 1};

  if (left.empty()) {
    text(s, pl.px + pl.pw / 2, pl.py + pl.ph / 2, "no data", "middle", 14);
    frame(s, pl, "distance to polytope boundary", "coupling", "");
  } else {
    double x0 = left.front().lx, x1 = x0, y0 = left.front().lylo, y1 = left.front().lyhi;
    for (const auto& r : left) {
      x0 = std::min(x0, r.lx);
      x1 = std::max(x1, r.lx);
      y0 = std::min(y0, r.lylo);
      y1 = std::max(y1, r.lyhi);
    }
    expand(x0, x1);
    expand(y0, y1);
    pl.x0 = x0;
    pl.x1 = x1;
    pl.y0 = y0;
    pl.y1 = y1;
    frame(s, pl, "distance to polytope boundary", "coupling", "");
    log_x_ticks(s, pl);
    log_y_ticks(s, pl, 8);
    for (std::size_t i = 1; i < left.size(); ++i)
      line(s, pl.x(left[i - 1].lx), pl.y(left[i - 1].ly), pl.x(left[i].lx),
           pl.y(left[i].ly), "#4477aa", 1.2);
    for (const auto& r : left) {
      line(s, pl.x(r.lx), pl.y(r.lylo), pl.x(r.lx), pl.y(r.lyhi), "#4477aa", 1);
      line(s, pl.x(r.lx) - 3, pl.y(r.ly), pl.x(r.lx) + 3, pl.y(r.ly), "#cc3311",
           1.5);
    }
  }

  if (right.empty()) {
    text(s, pr.px + pr.pw / 2, pr.py + pr.ph / 2, "no data", "middle", 14);
    frame(s, pr, "pinning surrogate Q", "coupling", "");
  } else {
    double x0 = right.front().first, x1 = x0, y0 = right.front().second, y1 = y0;
    for (const auto& [x, y] : right) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    expand(x0, x1);
    expand(y0, y1);
    pr.x0 = x0;
    pr.x1 = x1;
    pr.y0 = y0;
    pr.y1 = y1;
    frame(s, pr, "pinning surrogate Q", "coupling", "");
    log_x_ticks(s, pr);
    lin_y_ticks(s, pr, 10);
    for (std::size_t i = 1; i < right.size(); ++i)
      line(s, pr.x(right[i - 1].first), pr.y(right[i - 1].second),
           pr.x(right[i].first), pr.y(right[i].second), "#117733", 1.2);
    for (const auto& [x, y] : right) {
      line(s, pr.x(x) - 3, pr.y(y) - 3, pr.x(x) + 3, pr.y(y) + 3, "#117733", 1.2);
      line(s, pr.x(x) - 3, pr.y(y) + 3, pr.x(x) + 3, pr.y(y) - 3, "#117733", 1.2);
    }
  }

  s += "</svg>\n";
  return s;
}

}  // namespace pinlab

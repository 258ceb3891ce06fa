// Copyright 2026 The mmsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmsched/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "mmsched/common.hpp"

namespace mmsched {
namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const {
    const double w = kWidth - kLeft - kRight;
    return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * w;
  }
  double py(double y) const {
    const double h = kHeight - kTop - kBottom;
    return kHeight - kBottom - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * h;
  }
};

std::vector<std::string> series_order(const Figure& f) {
  std::vector<std::string> names;
  for (const auto& p : f.points) {
    if (std::find(names.begin(), names.end(), p.series) == names.end()) {
      names.push_back(p.series);
    }
  }
  return names;
}

void axes(std::ostringstream& o, const Figure& f, const Frame& fr,
          bool numeric_x) {
  o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
    << "font-size=\"16\">" << escape(f.title) << "</text>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
    << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
    << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = fr.y0 + (fr.y1 - fr.y0) * i / 5.0;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << fr.py(v) + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(v) << "</text>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fr.py(v) << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << fr.py(v)
      << "\" stroke=\"#ddd\"/>\n";
  }
  if (numeric_x) {
    for (int i = 0; i <= 5; ++i) {
      const double v = fr.x0 + (fr.x1 - fr.x0) * i / 5.0;
      o << "<text x=\"" << fr.px(v) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(v)
        << "</text>\n";
    }
  }
  o << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
    << kHeight - 14 << "\" text-anchor=\"middle\" font-size=\"13\">"
    << escape(f.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
    << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
    << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(f.y_label)
    << "</text>\n";
}

void legend(std::ostringstream& o, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 18.0 * static_cast<double>(i);
    o << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << y
      << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[i % 10]
      << "\"/>\n";
    o << "<text x=\"" << kWidth - kRight + 30 << "\" y=\"" << y + 10
      << "\" font-size=\"11\">" << escape(names[i]) << "</text>\n";
  }
}

}  // namespace

std::string to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::kBar: return "bar";
    case FigureKind::kLine: return "line";
    case FigureKind::kCdf: return "cdf";
  }
  return "bar";
}

FigureKind parse_figure_kind(const std::string& s) {
  if (s == "bar") return FigureKind::kBar;
  if (s == "line") return FigureKind::kLine;
  if (s == "cdf") return FigureKind::kCdf;
  throw ConfigError("unknown figure kind '" + s + "'");
}

std::string render_svg(const Figure& f) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const auto names = series_order(f);
  double ymin = 0.0, ymax = 0.0;
  for (const auto& p : f.points) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  if (f.kind == FigureKind::kCdf) ymax = 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  if (f.kind == FigureKind::kBar) {
    std::vector<std::string> cats;
    for (const auto& p : f.points) {
      if (std::find(cats.begin(), cats.end(), p.x) == cats.end()) {
        cats.push_back(p.x);
      }
    }
    const Frame fr{0.0, 1.0, ymin, ymax * 1.05};
    axes(o, f, fr, false);
    const double plot_w = kWidth - kLeft - kRight;
    const double group_w = plot_w / std::max<std::size_t>(cats.size(), 1);
    const double bar_w = 0.8 * group_w / std::max<std::size_t>(names.size(), 1);
    for (std::size_t c = 0; c < cats.size(); ++c) {
      const double gx = kLeft + group_w * static_cast<double>(c);
      o << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(cats[c])
        << "</text>\n";
      for (const auto& p : f.points) {
        if (p.x != cats[c]) continue;
        const auto s = static_cast<std::size_t>(
            std::find(names.begin(), names.end(), p.series) - names.begin());
        const double x = gx + 0.1 * group_w + bar_w * static_cast<double>(s);
        const double top = fr.py(std::max(p.y, 0.0));
        const double base = fr.py(std::min(p.y, 0.0));
        o << "<rect x=\"" << x << "\" y=\"" << top << "\" width=\"" << bar_w
          << "\" height=\"" << base - top << "\" fill=\"" << kPalette[s % 10]
          << "\"/>\n";
      }
    }
  } else {
    double xmin = 0.0, xmax = 1.0;
    bool first = true;
    for (const auto& p : f.points) {
      const double x = std::stod(p.x);
      if (first) {
        xmin = xmax = x;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
    const Frame fr{xmin, xmax, ymin, ymax * 1.05};
    axes(o, f, fr, true);
    for (std::size_t s = 0; s < names.size(); ++s) {
      std::string pts;
      double prev_y = 0.0;
      bool started = false;
      for (const auto& p : f.points) {
        if (p.series != names[s]) continue;
        const double x = fr.px(std::stod(p.x));
        if (f.kind == FigureKind::kCdf && started) {
          pts += fmt(x) + "," + fmt(fr.py(prev_y)) + " ";
        }
        pts += fmt(x) + "," + fmt(fr.py(p.y)) + " ";
        prev_y = p.y;
        started = true;
      }
      o << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\""
        << kPalette[s % 10] << "\" points=\"" << pts << "\"/>\n";
    }
  }
  legend(o, names);
  o << "</svg>\n";
  return o.str();
}

namespace {

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

std::string figure_csv(const Figure& f, const std::vector<std::string>& header) {
  std::ostringstream o;
  o << "# figure: " << to_string(f.kind) << "\n";
  o << "# title: " << f.title << "\n";
  o << "# x_label: " << f.x_label << "\n";
  o << "# y_label: " << f.y_label << "\n";
  for (const auto& h : header) o << "# " << h << "\n";
  o << "series,x,y\n";
  char buf[40];
  for (const auto& p : f.points) {
    std::snprintf(buf, sizeof buf, "%.17g", p.y);
    o << csv_field(p.series) << "," << csv_field(p.x) << "," << buf << "\n";
  }
  return o.str();
}

Figure parse_figure_csv(const std::string& text) {
  Figure f;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      const std::string value =
          colon + 2 <= line.size() ? line.substr(colon + 2) : "";
      if (key == "figure") f.kind = parse_figure_kind(value);
      if (key == "title") f.title = value;
      if (key == "x_label") f.x_label = value;
      if (key == "y_label") f.y_label = value;
      continue;
    }
    if (!header_seen) {
      if (line != "series,x,y") throw ConfigError("not a figure CSV");
      header_seen = true;
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw ConfigError("malformed figure CSV row '" + line + "'");
    }
    f.points.push_back(FigurePoint{fields[0], fields[1], std::stod(fields[2])});
  }
  if (!header_seen) throw ConfigError("not a figure CSV");
  return f;
}

}  // namespace mmsched

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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mmsched {

enum class FigureKind { kBar, kLine, kCdf };

struct FigurePoint {
  std::string series;
  std::string x;  // category label for bars, number otherwise
  double y = 0.0;
};

struct Figure {
  FigureKind kind = FigureKind::kBar;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<FigurePoint> points;
};

std::string render_svg(const Figure& figure);

// Long-format twin CSV (series,x,y). Lines in the header block start with '#'
// and carry the figure metadata plus any extra provenance lines given.
std::string figure_csv(const Figure& figure,
                       const std::vector<std::string>& header);
Figure parse_figure_csv(const std::string& text);

std::string to_string(FigureKind kind);
FigureKind parse_figure_kind(const std::string& s);

}  // namespace mmsched

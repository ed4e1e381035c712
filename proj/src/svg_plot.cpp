// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "pbitnqs/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace pbitnqs {

namespace {

constexpr double kWidth = 880;
constexpr double kHeight = 540;
constexpr double kLeft = 80;
constexpr double kRight = 30;
constexpr double kTop = 40;
constexpr double kBottom = 60;

std::string num(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

}  // namespace

void write_convergence_svg(std::ostream& os, const TrainHistory& history,
                           std::optional<double> exact_energy) {
    const auto& recs = history.records;
    double y_min = exact_energy.value_or(0.0);
    double y_max = y_min;
    if (!recs.empty()) {
        y_min = y_max = recs.front().energy_mean;
        for (const auto& r : recs) {
            y_min = std::min(y_min, r.energy_mean - r.energy_stderr);
            y_max = std::max(y_max, r.energy_mean + r.energy_stderr);
        }
    }
    if (exact_energy) {
        y_min = std::min(y_min, *exact_energy);
        y_max = std::max(y_max, *exact_energy);
    }
    const double pad = std::max(0.05 * (y_max - y_min), 0.5);
    y_min -= pad;
    y_max += pad;
    const double x_max = recs.empty() ? 1.0 : static_cast<double>(recs.back().epoch) + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto x_of = [&](double epoch) { return kLeft + plot_w * epoch / x_max; };
    auto y_of = [&](double e) { return kTop + plot_h * (y_max - e) / (y_max - y_min); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">Variational energy per epoch</text>\n";

    // Axes frame and ticks.
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
       << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double e = y_max - (y_max - y_min) * t / 5.0;
        const double y = y_of(e);
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\""
           << y << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << kLeft - 9 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << num(e)
           << "</text>\n";
        const double epoch = x_max * t / 5.0;
        const double x = x_of(epoch);
        os << "<line x1=\"" << x << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x << "\" y2=\""
           << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
           << static_cast<long>(epoch) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">epoch</text>\n";
    os << "<text x=\"20\" y=\"" << kTop + plot_h / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
          "transform=\"rotate(-90 20 "
       << kTop + plot_h / 2 << ")\">energy</text>\n";

    // Standard-error band.
    if (recs.size() > 1) {
        os << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.45\" stroke=\"none\" points=\"";
        for (const auto& r : recs)
            os << num(x_of(r.epoch)) << "," << num(y_of(r.energy_mean + r.energy_stderr)) << " ";
        for (auto it = recs.rbegin(); it != recs.rend(); ++it)
            os << num(x_of(it->epoch)) << "," << num(y_of(it->energy_mean - it->energy_stderr))
               << " ";
        os << "\"/>\n";
    }

    // Energy trace.
    if (!recs.empty()) {
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (const auto& r : recs)
            os << num(x_of(r.epoch)) << "," << num(y_of(r.energy_mean)) << " ";
        os << "\"/>\n";
    }

    // Exact reference line.
    if (exact_energy) {
        const double y = y_of(*exact_energy);
        os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + plot_w
           << "\" y2=\"" << y
           << "\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"8 5\"/>\n";
        os << "<text x=\"" << kLeft + plot_w - 6 << "\" y=\"" << y - 6
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
              "fill=\"#d62728\">exact "
           << num(*exact_energy) << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace pbitnqs

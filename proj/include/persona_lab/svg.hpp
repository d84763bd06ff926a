#pragma once

#include "persona_lab/persona.hpp"

#include <string>
#include <vector>

namespace persona_lab::svg {

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    Group group = Group::Analytical;
};

std::string pca_scatter(const std::vector<ScatterPoint> &points, const std::vector<double> &explained_ratio,
                        const std::string &title);

struct BoxSeries {
    std::string label; // e.g. "creative BeforeWriting"
    Group group = Group::Analytical;
    std::vector<double> values;
};

/// One panel per trait; series are drawn left to right in the given order.
std::string boxplots(const std::vector<std::pair<std::string, std::vector<BoxSeries>>> &panels,
                     const std::string &title);

struct BoxStats {
    double q1 = 0, median = 0, q3 = 0, whisker_low = 0, whisker_high = 0;
    std::vector<double> outliers;
};

/// Quartiles by linear interpolation; whiskers reach the furthest points within 1.5 IQR.
BoxStats box_stats(std::vector<double> values);

} // namespace persona_lab::svg

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardedge/params.hpp"

namespace hardedge {

/// Pool-adjacent-violators projection onto nondecreasing sequences.
inline void isotonic_increasing(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> level(n);
    std::vector<double> weight(n);
    std::vector<std::size_t> count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        level[blocks] = v[i];
        weight[blocks] = 1.0;
        count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && level[blocks - 2] > level[blocks - 1]) {
            const double w = weight[blocks - 2] + weight[blocks - 1];
            level[blocks - 2] =
                (level[blocks - 2] * weight[blocks - 2] +
                 level[blocks - 1] * weight[blocks - 1]) /
                w;
            weight[blocks - 2] = w;
            count[blocks - 2] += count[blocks - 1];
            --blocks;
        }
    }
    std::size_t pos = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t k = 0; k < count[b]; ++k) v[pos++] = level[b];
    }
}

/// Tabulated survival function x -> p1(x) (probability that the unit-level
/// process started at x never explodes), monotone after isotonic
/// projection. Lookup is linear between nodes, 0 below the grid and the
/// plateau value above it.
struct P1Table {
    EnsembleParams params{1.0, 0.0, 0.0};
    std::vector<double> xs;
    std::vector<double> values;
    std::vector<double> stderrs;
    double plateau = 0.0;
    double plateau_stderr = 0.0;

    double lookup(double x) const {
        if (xs.empty()) throw std::logic_error("P1Table: empty table");
        if (x <= xs.front()) return x < xs.front() ? 0.0 : values.front();
        if (x >= xs.back()) return plateau;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return values[j - 1] + t * (values[j] - values[j - 1]);
    }

    void save_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("P1Table: cannot open " + path);
        char buf[256];
        out << "# hardedge-p1 v1\n";
        std::snprintf(buf, sizeof(buf),
                      "# beta=%.17g a=%.17g plateau=%.17g plateau_stderr=%.17g\n",
                      params.beta, params.a, plateau, plateau_stderr);
        out << buf;
        out << "x,value,stderr\n";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", xs[i],
                          values[i], stderrs[i]);
            out << buf;
        }
    }

    static std::optional<P1Table> load_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) return std::nullopt;
        std::string line;
        if (!std::getline(in, line) || line != "# hardedge-p1 v1") {
            return std::nullopt;
        }
        P1Table t;
        if (!std::getline(in, line)) return std::nullopt;
        double beta = 0.0, a = 0.0;
        if (std::sscanf(line.c_str(),
                        "# beta=%lg a=%lg plateau=%lg plateau_stderr=%lg",
                        &beta, &a, &t.plateau, &t.plateau_stderr) != 4) {
            return std::nullopt;
        }
        t.params = make_params(beta, a);
        std::getline(in, line);  // column header
        while (std::getline(in, line)) {
            double x = 0.0, v = 0.0, s = 0.0;
            if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &x, &v, &s) == 3) {
                t.xs.push_back(x);
                t.values.push_back(v);
                t.stderrs.push_back(s);
            }
        }
        if (t.xs.empty()) return std::nullopt;
        return t;
    }
};

}  // namespace hardedge

#pragma once

#include <span>
#include <vector>

#include "dim3/common.hpp"
#include "dim3/special.hpp"

namespace dim3 {

// Unsigned Stirling numbers of the first kind in log space, grown on
// demand via S(N+1,m) = S(N,m-1) + N*S(N,m). Row N holds m = 1..N.
class StirlingTable {
public:
    std::span<const double> row(int n) {
        if (n < 1) throw NumericError("StirlingTable: row index must be >= 1");
        while (static_cast<int>(rows_.size()) < n + 1) grow();
        return rows_[n];
    }

    double log_s(int n, int m) {
        if (m < 1 || m > n) throw NumericError("StirlingTable: m out of range");
        return row(n)[m - 1];
    }

private:
    void grow() {
        if (rows_.empty()) {
            rows_.push_back({});      // row 0 placeholder
            rows_.push_back({0.0});   // S(1,1) = 1
            return;
        }
        const auto& prev = rows_.back();
        int n = static_cast<int>(rows_.size()) - 1;  // prev is row n
        std::vector<double> next(n + 1);
        double logn = std::log(static_cast<double>(n));
        for (int m = 1; m <= n + 1; ++m) {
            double from_lower = m >= 2 ? prev[m - 2] : -HUGE_VAL;            // S(n, m-1)
            double from_same = m <= n ? logn + prev[m - 1] : -HUGE_VAL;       // n*S(n, m)
            if (from_lower < from_same) std::swap(from_lower, from_same);
            next[m - 1] = from_same == -HUGE_VAL
                              ? from_lower
                              : from_lower + std::log1p(std::exp(from_same - from_lower));
        }
        rows_.push_back(std::move(next));
    }

    std::vector<std::vector<double>> rows_;
};

}  // namespace dim3

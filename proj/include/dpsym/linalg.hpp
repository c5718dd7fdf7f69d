#pragma once

// Dense exact linear algebra over any field F providing default construction
// (zero), +, -, *, /, unary -, and a scalar_is_zero(F) overload.  Sizes here
// are small (determining systems and span checks), so plain Gaussian
// elimination is the right tool.

#include <cstddef>
#include <utility>
#include <vector>

namespace dpsym {

/// In-place row echelon reduction; returns the rank.
template <class F>
std::size_t row_reduce(std::vector<std::vector<F>>& rows) {
    if (rows.empty()) return 0;
    std::size_t cols = rows[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && scalar_is_zero(rows[pivot][col])) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        F inv_lead = rows[rank][col];
        for (std::size_t j = col; j < cols; ++j) rows[rank][j] = rows[rank][j] / inv_lead;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || scalar_is_zero(rows[r][col])) continue;
            F factor = rows[r][col];
            for (std::size_t j = col; j < cols; ++j)
                rows[r][j] = rows[r][j] - factor * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

template <class F>
std::size_t matrix_rank(std::vector<std::vector<F>> rows) {
    return row_reduce(rows);
}

template <class F>
struct LinearSolution {
    bool consistent = false;
    std::vector<F> particular;               // one solution of A x = b
    std::vector<std::vector<F>> nullspace;   // basis of A x = 0
};

/// Solve A x = b exactly (A given as rows).
template <class F>
LinearSolution<F> solve_linear_system(std::vector<std::vector<F>> a, std::vector<F> b) {
    LinearSolution<F> out;
    std::size_t n_rows = a.size();
    std::size_t n_cols = n_rows ? a[0].size() : 0;
    // Augment, reduce, read off.
    for (std::size_t r = 0; r < n_rows; ++r) a[r].push_back(b[r]);
    row_reduce(a);

    std::vector<std::ptrdiff_t> pivot_of_col(n_cols, -1);
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::size_t lead = 0;
        while (lead < n_cols + 1 && scalar_is_zero(a[r][lead])) ++lead;
        if (lead == n_cols) return out;  // 0 = nonzero: inconsistent
        if (lead < n_cols) pivot_of_col[lead] = static_cast<std::ptrdiff_t>(r);
    }

    out.consistent = true;
    out.particular.assign(n_cols, F{});
    for (std::size_t c = 0; c < n_cols; ++c)
        if (pivot_of_col[c] >= 0)
            out.particular[c] = a[static_cast<std::size_t>(pivot_of_col[c])][n_cols];

    for (std::size_t free_col = 0; free_col < n_cols; ++free_col) {
        if (pivot_of_col[free_col] >= 0) continue;
        // Kernel vector with this free variable set to one.
        std::vector<F> basis(n_cols, F{});
        basis[free_col] = unit_scalar(basis[free_col]);
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (pivot_of_col[c] < 0) continue;
            basis[c] = -a[static_cast<std::size_t>(pivot_of_col[c])][free_col];
        }
        out.nullspace.push_back(std::move(basis));
    }
    return out;
}

}  // namespace dpsym

#include "homoperc/field_linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace homoperc {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t k = 2; k * k <= n; ++k) {
        if (n % k == 0) return false;
    }
    return true;
}

PrimeField::PrimeField(std::uint32_t q) : q_(q) {
    if (q >= (1u << 16)) {
        throw std::invalid_argument("field modulus must be below 65536, got " + std::to_string(q));
    }
    if (!is_prime(q)) {
        throw std::invalid_argument("field modulus must be prime, got " + std::to_string(q));
    }
}

Scalar PrimeField::inv(Scalar a) const {
    if (a % q_ == 0) throw std::domain_error("inverse of zero in GF(q)");
    Scalar result = 1;
    Scalar base = a % q_;
    std::uint32_t e = q_ - 2;
    while (e > 0) {
        if (e & 1u) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

// ---------------------------------------------------------------------------

SparseFieldMatrix::SparseFieldMatrix(std::size_t n_rows, std::vector<SparseColumn> columns)
    : n_rows_(n_rows) {
    columns_.reserve(columns.size());
    for (auto& c : columns) push_column(std::move(c));
}

SparseFieldMatrix SparseFieldMatrix::from_dense(const std::vector<std::vector<std::int64_t>>& rows,
                                                const PrimeField& f) {
    const std::size_t n_rows = rows.size();
    const std::size_t n_cols = n_rows == 0 ? 0 : rows.front().size();
    SparseFieldMatrix m(n_rows);
    for (std::size_t j = 0; j < n_cols; ++j) {
        SparseColumn col;
        for (std::size_t r = 0; r < n_rows; ++r) {
            if (rows[r].size() != n_cols) throw std::invalid_argument("ragged dense matrix");
            Scalar v = f.reduce(rows[r][j]);
            if (v != 0) col.push_back({r, v});
        }
        m.push_column(std::move(col));
    }
    return m;
}

std::size_t SparseFieldMatrix::nonzeros() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.size();
    return n;
}

void SparseFieldMatrix::push_column(SparseColumn col) {
    for (std::size_t k = 0; k < col.size(); ++k) {
        if (col[k].row >= n_rows_) throw std::out_of_range("column entry row out of range");
        if (col[k].value == 0) throw std::invalid_argument("stored zero in sparse column");
        if (k > 0 && col[k - 1].row >= col[k].row) {
            throw std::invalid_argument("sparse column rows must be strictly increasing");
        }
    }
    columns_.push_back(std::move(col));
}

SparseFieldMatrix SparseFieldMatrix::transpose() const {
    std::vector<SparseColumn> rows(n_rows_);
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        for (const auto& e : columns_[j]) rows[e.row].push_back({j, e.value});
    }
    SparseFieldMatrix t(columns_.size());
    t.columns_ = std::move(rows);
    return t;
}

std::vector<std::vector<Scalar>> SparseFieldMatrix::to_dense() const {
    std::vector<std::vector<Scalar>> d(n_rows_, std::vector<Scalar>(columns_.size(), 0));
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        for (const auto& e : columns_[j]) d[e.row][j] = e.value;
    }
    return d;
}

SparseFieldMatrix SparseFieldMatrix::multiply(const SparseFieldMatrix& other,
                                              const PrimeField& f) const {
    if (other.n_rows() != n_cols()) throw std::invalid_argument("dimension mismatch in multiply");
    SparseFieldMatrix out(n_rows_);
    std::vector<Scalar> acc(n_rows_, 0);
    std::vector<std::size_t> touched;
    for (const auto& ocol : other.columns()) {
        touched.clear();
        for (const auto& oe : ocol) {
            for (const auto& e : columns_[oe.row]) {
                if (acc[e.row] == 0) touched.push_back(e.row);
                acc[e.row] = f.add(acc[e.row], f.mul(e.value, oe.value));
            }
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        SparseColumn col;
        for (std::size_t r : touched) {
            if (acc[r] != 0) col.push_back({r, acc[r]});
            acc[r] = 0;
        }
        out.columns_.push_back(std::move(col));
    }
    return out;
}

std::vector<Scalar> SparseFieldMatrix::apply(std::span<const Scalar> v, const PrimeField& f) const {
    if (v.size() != n_cols()) throw std::invalid_argument("dimension mismatch in apply");
    std::vector<Scalar> out(n_rows_, 0);
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (v[j] == 0) continue;
        for (const auto& e : columns_[j]) out[e.row] = f.add(out[e.row], f.mul(e.value, v[j]));
    }
    return out;
}

SparseFieldMatrix SparseFieldMatrix::select_columns(std::span<const std::size_t> order) const {
    SparseFieldMatrix out(n_rows_);
    out.columns_.reserve(order.size());
    for (std::size_t j : order) out.columns_.push_back(columns_.at(j));
    return out;
}

SparseFieldMatrix SparseFieldMatrix::permute_rows(std::span<const std::size_t> new_index_of_row,
                                                  std::size_t new_n_rows) const {
    if (new_index_of_row.size() != n_rows_) throw std::invalid_argument("row map size mismatch");
    SparseFieldMatrix out(new_n_rows);
    out.columns_.reserve(columns_.size());
    for (const auto& c : columns_) {
        SparseColumn nc;
        nc.reserve(c.size());
        for (const auto& e : c) {
            std::size_t r = new_index_of_row[e.row];
            if (r == kNoPivot) continue;
            if (r >= new_n_rows) throw std::out_of_range("row map target out of range");
            nc.push_back({r, e.value});
        }
        std::sort(nc.begin(), nc.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
        out.columns_.push_back(std::move(nc));
    }
    return out;
}

// ---------------------------------------------------------------------------

void axpy_column(SparseColumn& col, Scalar c, const SparseColumn& other, const PrimeField& f,
                 SparseColumn& scratch) {
    scratch.clear();
    scratch.reserve(col.size() + other.size());
    auto a = col.begin();
    auto b = other.begin();
    while (a != col.end() || b != other.end()) {
        if (b == other.end() || (a != col.end() && a->row < b->row)) {
            scratch.push_back(*a++);
        } else if (a == col.end() || b->row < a->row) {
            Scalar v = f.mul(c, b->value);
            if (v != 0) scratch.push_back({b->row, v});
            ++b;
        } else {
            Scalar v = f.add(a->value, f.mul(c, b->value));
            if (v != 0) scratch.push_back({a->row, v});
            ++a;
            ++b;
        }
    }
    col.swap(scratch);
}

namespace {

std::size_t dense_rank(const SparseFieldMatrix& m, const PrimeField& f) {
    auto a = m.to_dense();
    const std::size_t rows = m.n_rows();
    const std::size_t cols = m.n_cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Scalar inv = f.inv(a[r][c]);
        for (std::size_t k = c; k < cols; ++k) a[r][k] = f.mul(a[r][k], inv);
        for (std::size_t i = r + 1; i < rows; ++i) {
            Scalar factor = a[i][c];
            if (factor == 0) continue;
            for (std::size_t k = c; k < cols; ++k) {
                a[i][k] = f.sub(a[i][k], f.mul(factor, a[r][k]));
            }
        }
        ++r;
    }
    return r;
}

void scale_column(SparseColumn& col, Scalar c, const PrimeField& f) {
    for (auto& e : col) e.value = f.mul(e.value, c);
}

// Row echelon over the leading (smallest) index; independent of the
// lowest-pivot column reduction used by filtration_reduce.
std::size_t sparse_echelon_rank(const SparseFieldMatrix& m, const PrimeField& f) {
    const SparseFieldMatrix rows = m.transpose();
    std::vector<SparseColumn> pivot_at(m.n_cols());
    std::vector<char> has_pivot(m.n_cols(), 0);
    SparseColumn scratch;
    std::size_t r = 0;
    for (SparseColumn v : rows.columns()) {
        while (!v.empty()) {
            const std::size_t lead = v.front().row;
            if (!has_pivot[lead]) {
                scale_column(v, f.inv(v.front().value), f);
                pivot_at[lead] = std::move(v);
                has_pivot[lead] = 1;
                ++r;
                break;
            }
            axpy_column(v, f.neg(v.front().value), pivot_at[lead], f, scratch);
        }
    }
    return r;
}

}  // namespace

std::size_t rank(const SparseFieldMatrix& m, const PrimeField& f) {
    if (m.n_cols() == 0 || m.n_rows() == 0) return 0;
    if (m.n_cols() < 64) return dense_rank(m, f);
    return sparse_echelon_rank(m, f);
}

std::vector<SparseColumn> kernel_basis(const SparseFieldMatrix& m, const PrimeField& f) {
    struct Pivot {
        SparseColumn vec;
        SparseColumn history;
    };
    std::vector<Pivot> pivot_at(m.n_rows());
    std::vector<char> has_pivot(m.n_rows(), 0);
    std::vector<SparseColumn> kernel;
    SparseColumn scratch;
    for (std::size_t j = 0; j < m.n_cols(); ++j) {
        SparseColumn vec = m.column(j);
        SparseColumn history{{j, 1}};
        while (!vec.empty()) {
            const std::size_t lead = vec.front().row;
            if (!has_pivot[lead]) break;
            const Scalar c = f.neg(vec.front().value);
            axpy_column(vec, c, pivot_at[lead].vec, f, scratch);
            axpy_column(history, c, pivot_at[lead].history, f, scratch);
        }
        if (vec.empty()) {
            kernel.push_back(std::move(history));
        } else {
            const std::size_t lead = vec.front().row;
            const Scalar inv = f.inv(vec.front().value);
            scale_column(vec, inv, f);
            scale_column(history, inv, f);
            pivot_at[lead] = Pivot{std::move(vec), std::move(history)};
            has_pivot[lead] = 1;
        }
    }
    return kernel;
}

ReductionOutcome filtration_reduce(const SparseFieldMatrix& columns, const PrimeField& f) {
    ReductionOutcome out;
    std::vector<SparseColumn> reduced(columns.columns());
    out.pivot_row_of_column.assign(reduced.size(), kNoPivot);
    std::vector<std::size_t> column_of_pivot(columns.n_rows(), kNoPivot);
    SparseColumn scratch;
    for (std::size_t j = 0; j < reduced.size(); ++j) {
        SparseColumn& col = reduced[j];
        while (!col.empty()) {
            const std::size_t low = col.back().row;
            const std::size_t k = column_of_pivot[low];
            if (k == kNoPivot) {
                column_of_pivot[low] = j;
                out.pivot_row_of_column[j] = low;
                ++out.rank;
                break;
            }
            const SparseColumn& piv = reduced[k];
            const Scalar c = f.neg(f.mul(col.back().value, f.inv(piv.back().value)));
            axpy_column(col, c, piv, f, scratch);
        }
    }
    out.reduced = SparseFieldMatrix(columns.n_rows(), std::move(reduced));
    return out;
}

}  // namespace homoperc

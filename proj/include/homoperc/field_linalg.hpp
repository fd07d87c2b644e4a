#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace homoperc {

using Scalar = std::uint32_t;

/// Arithmetic in GF(q) for a prime q < 2^16. Values are kept in [0, q).
class PrimeField {
public:
    /// Throws std::invalid_argument unless q is a prime below 2^16.
    explicit PrimeField(std::uint32_t q);

    std::uint32_t modulus() const { return q_; }
    std::uint32_t characteristic() const { return q_; }

    Scalar reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(q_);
        return static_cast<Scalar>(r < 0 ? r + q_ : r);
    }
    Scalar add(Scalar a, Scalar b) const { return (a + b) % q_; }
    Scalar sub(Scalar a, Scalar b) const { return (a + q_ - b) % q_; }
    Scalar neg(Scalar a) const { return a == 0 ? 0 : q_ - a; }
    Scalar mul(Scalar a, Scalar b) const { return (a * b) % q_; }
    Scalar inv(Scalar a) const;

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

private:
    std::uint32_t q_;
};

bool is_prime(std::uint64_t n);

inline constexpr std::size_t kNoPivot = static_cast<std::size_t>(-1);

struct Entry {
    std::size_t row;
    Scalar value;
    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sparse column: entries sorted by strictly increasing row, no zeros.
using SparseColumn = std::vector<Entry>;

/// Column-sparse matrix over GF(q). Entries are assumed canonical for the
/// field the matrix is used with.
class SparseFieldMatrix {
public:
    SparseFieldMatrix() = default;
    explicit SparseFieldMatrix(std::size_t n_rows) : n_rows_(n_rows) {}
    SparseFieldMatrix(std::size_t n_rows, std::vector<SparseColumn> columns);

    /// Builds from a dense row-major table; entries are reduced into the field.
    static SparseFieldMatrix from_dense(const std::vector<std::vector<std::int64_t>>& rows,
                                        const PrimeField& f);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return columns_.size(); }
    const std::vector<SparseColumn>& columns() const { return columns_; }
    const SparseColumn& column(std::size_t j) const { return columns_[j]; }
    std::size_t nonzeros() const;

    /// Appends a column; throws if rows are unsorted, out of range or zero.
    void push_column(SparseColumn col);

    SparseFieldMatrix transpose() const;
    std::vector<std::vector<Scalar>> to_dense() const;

    /// Product this * other over f.
    SparseFieldMatrix multiply(const SparseFieldMatrix& other, const PrimeField& f) const;
    /// Product this * v for a dense vector v.
    std::vector<Scalar> apply(std::span<const Scalar> v, const PrimeField& f) const;

    /// Columns picked by index, in the given order.
    SparseFieldMatrix select_columns(std::span<const std::size_t> order) const;
    /// Row r moves to new_index_of_row[r]; rows mapped to kNoPivot are dropped.
    SparseFieldMatrix permute_rows(std::span<const std::size_t> new_index_of_row,
                                   std::size_t new_n_rows) const;

    friend bool operator==(const SparseFieldMatrix&, const SparseFieldMatrix&) = default;

private:
    std::size_t n_rows_ = 0;
    std::vector<SparseColumn> columns_;
};

struct ReductionOutcome {
    std::size_t rank = 0;
    /// Lowest nonzero row of each reduced column, or kNoPivot.
    std::vector<std::size_t> pivot_row_of_column;
    SparseFieldMatrix reduced;
};

/// Rank over GF(q). Dense elimination below 64 columns, sparse row echelon
/// otherwise.
std::size_t rank(const SparseFieldMatrix& m, const PrimeField& f);

/// Basis of the null space. Each vector is sparse over the column index set.
std::vector<SparseColumn> kernel_basis(const SparseFieldMatrix& m, const PrimeField& f);

/// Left-to-right column reduction with lowest-row pivots. Each column has
/// multiples of earlier columns added until its lowest row is not the pivot
/// of any earlier column, or it vanishes.
ReductionOutcome filtration_reduce(const SparseFieldMatrix& columns, const PrimeField& f);

/// col += c * other, both sorted; result stays sorted with zeros dropped.
void axpy_column(SparseColumn& col, Scalar c, const SparseColumn& other, const PrimeField& f,
                 SparseColumn& scratch);

}  // namespace homoperc

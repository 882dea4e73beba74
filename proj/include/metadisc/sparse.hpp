#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace metadisc {

/// Compressed-sparse-row matrix of doubles. Column indices are strictly
/// increasing within each row (no duplicates), values finite.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), rowPtr_(rows + 1, 0) {}

    static CsrMatrix fromTriplets(size_t rows, size_t cols,
                                  std::vector<std::tuple<uint64_t, uint32_t, double>> triplets);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t nnz() const { return values_.size(); }

    std::span<const uint32_t> rowIndices(size_t row) const {
        return {colIdx_.data() + rowPtr_[row], colIdx_.data() + rowPtr_[row + 1]};
    }
    std::span<const double> rowValues(size_t row) const {
        return {values_.data() + rowPtr_[row], values_.data() + rowPtr_[row + 1]};
    }

    double at(size_t row, uint32_t col) const; // binary search, 0 when absent

    /// Appends one row given (col, value) pairs sorted by column; zeros skipped.
    void appendRow(const std::vector<std::pair<uint32_t, double>>& entries);

    /// Keeps the given (sorted, unique) columns and renumbers them 0..k-1.
    CsrMatrix selectColumns(const std::vector<uint32_t>& sortedCols) const;

    /// Copies the given rows, in order.
    CsrMatrix selectRows(const std::vector<size_t>& rowIds) const;

    std::vector<std::vector<double>> toDense() const;

    const std::vector<uint64_t>& rowPtr() const { return rowPtr_; }
    const std::vector<uint32_t>& colIdx() const { return colIdx_; }
    const std::vector<double>& values() const { return values_; }

    // On-disk layout: three 8-byte little-endian integers (rows, cols, nnz),
    // then row_ptr as (rows+1) uint64, column indices as nnz uint32, and
    // values as nnz float64.
    void save(const std::string& path) const;
    static CsrMatrix load(const std::string& path);

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<uint64_t> rowPtr_ = {0};
    std::vector<uint32_t> colIdx_;
    std::vector<double> values_;
};

/// Dense binary label matrix (rows x labels, entries 0/1).
struct LabelMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<uint8_t> data; // row-major

    uint8_t at(size_t r, size_t c) const { return data[r * cols + c]; }
    void set(size_t r, size_t c, bool v) { data[r * cols + c] = v ? 1 : 0; }

    static LabelMatrix zeros(size_t rows, size_t cols) {
        return LabelMatrix{rows, cols, std::vector<uint8_t>(rows * cols, 0)};
    }

    void save(const std::string& path) const; // "MDCLBL01" + rows/cols u64 + bytes
    static LabelMatrix load(const std::string& path);
};

} // namespace metadisc

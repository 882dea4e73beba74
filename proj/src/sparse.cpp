#include "metadisc/sparse.hpp"

#include "metadisc/binary_io.hpp"
#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

namespace metadisc {

CsrMatrix CsrMatrix::fromTriplets(size_t rows, size_t cols,
                                  std::vector<std::tuple<uint64_t, uint32_t, double>> triplets) {
    std::sort(triplets.begin(), triplets.end());
    CsrMatrix m(rows, cols);
    m.rowPtr_.assign(rows + 1, 0);
    m.colIdx_.clear();
    m.values_.clear();
    size_t i = 0;
    for (size_t r = 0; r < rows; ++r) {
        uint32_t lastCol = 0;
        bool first = true;
        while (i < triplets.size() && std::get<0>(triplets[i]) == r) {
            const uint32_t c = std::get<1>(triplets[i]);
            const double v = std::get<2>(triplets[i]);
            if (!first && c == lastCol) throw Error("duplicate (row, col) entry in triplets");
            if (c >= cols) throw Error("column index out of range");
            if (!std::isfinite(v)) throw Error("non-finite matrix value");
            if (v != 0.0) {
                m.colIdx_.push_back(c);
                m.values_.push_back(v);
            }
            lastCol = c;
            first = false;
            ++i;
        }
        m.rowPtr_[r + 1] = m.colIdx_.size();
    }
    if (i != triplets.size()) throw Error("row index out of range in triplets");
    return m;
}

double CsrMatrix::at(size_t row, uint32_t col) const {
    const auto cols = rowIndices(row);
    const auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col) return 0.0;
    return values_[rowPtr_[row] + static_cast<size_t>(it - cols.begin())];
}

void CsrMatrix::appendRow(const std::vector<std::pair<uint32_t, double>>& entries) {
    for (size_t k = 0; k < entries.size(); ++k) {
        if (k > 0 && entries[k].first <= entries[k - 1].first) {
            throw Error("row entries must have strictly increasing columns");
        }
        if (entries[k].first >= cols_) throw Error("column index out of range");
        if (!std::isfinite(entries[k].second)) throw Error("non-finite matrix value");
        if (entries[k].second == 0.0) continue;
        colIdx_.push_back(entries[k].first);
        values_.push_back(entries[k].second);
    }
    ++rows_;
    rowPtr_.push_back(colIdx_.size());
}

CsrMatrix CsrMatrix::selectColumns(const std::vector<uint32_t>& sortedCols) const {
    std::vector<int64_t> remap(cols_, -1);
    for (size_t k = 0; k < sortedCols.size(); ++k) remap[sortedCols[k]] = static_cast<int64_t>(k);

    CsrMatrix out;
    out.rows_ = rows_;
    out.cols_ = sortedCols.size();
    out.rowPtr_.assign(1, 0);
    for (size_t r = 0; r < rows_; ++r) {
        const auto cols = rowIndices(r);
        const auto vals = rowValues(r);
        for (size_t k = 0; k < cols.size(); ++k) {
            const int64_t nc = remap[cols[k]];
            if (nc < 0) continue;
            out.colIdx_.push_back(static_cast<uint32_t>(nc));
            out.values_.push_back(vals[k]);
        }
        out.rowPtr_.push_back(out.colIdx_.size());
    }
    return out;
}

CsrMatrix CsrMatrix::selectRows(const std::vector<size_t>& rowIds) const {
    CsrMatrix out;
    out.rows_ = rowIds.size();
    out.cols_ = cols_;
    out.rowPtr_.assign(1, 0);
    for (size_t r : rowIds) {
        const auto cols = rowIndices(r);
        const auto vals = rowValues(r);
        out.colIdx_.insert(out.colIdx_.end(), cols.begin(), cols.end());
        out.values_.insert(out.values_.end(), vals.begin(), vals.end());
        out.rowPtr_.push_back(out.colIdx_.size());
    }
    return out;
}

std::vector<std::vector<double>> CsrMatrix::toDense() const {
    std::vector<std::vector<double>> dense(rows_, std::vector<double>(cols_, 0.0));
    for (size_t r = 0; r < rows_; ++r) {
        const auto cols = rowIndices(r);
        const auto vals = rowValues(r);
        for (size_t k = 0; k < cols.size(); ++k) dense[r][cols[k]] = vals[k];
    }
    return dense;
}

void CsrMatrix::save(const std::string& path) const {
    atomicWriteStream(path, [&](std::ostream& out) {
        writeU64(out, rows_);
        writeU64(out, cols_);
        writeU64(out, nnz());
        for (uint64_t p : rowPtr_) writeU64(out, p);
        for (uint32_t c : colIdx_) writeU32(out, c);
        for (double v : values_) writeF64(out, v);
    });
}

CsrMatrix CsrMatrix::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open matrix file: " + path);
    CsrMatrix m;
    m.rows_ = readU64(in);
    m.cols_ = readU64(in);
    const uint64_t nnz = readU64(in);
    m.rowPtr_.resize(m.rows_ + 1);
    for (auto& p : m.rowPtr_) p = readU64(in);
    m.colIdx_.resize(nnz);
    for (auto& c : m.colIdx_) c = readU32(in);
    m.values_.resize(nnz);
    for (auto& v : m.values_) v = readF64(in);
    if (m.rowPtr_.back() != nnz) throw Error("corrupt matrix file: " + path);
    return m;
}

void LabelMatrix::save(const std::string& path) const {
    atomicWriteStream(path, [&](std::ostream& out) {
        writeMagic(out, "MDCLBL01");
        writeU64(out, rows);
        writeU64(out, cols);
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
    });
}

LabelMatrix LabelMatrix::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open label file: " + path);
    expectMagic(in, "MDCLBL01");
    LabelMatrix m;
    m.rows = readU64(in);
    m.cols = readU64(in);
    m.data.resize(m.rows * m.cols);
    in.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(m.data.size()));
    if (!in) throw Error("corrupt label file: " + path);
    return m;
}

} // namespace metadisc

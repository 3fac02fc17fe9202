#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pedcross/domain.hpp"
#include "pedcross/errors.hpp"

namespace pedcross {

// Dense row-major matrix of doubles; tiny on purpose.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Per-column provenance: which feature a column came from, the category
// label for one-hot columns, and the scaling applied (if any).
struct ColumnMeta {
    FeatureId feature = FeatureId::Ta;
    std::string category;        // one-hot columns only
    bool one_hot = false;
    bool standardized = false;
    double mean = 0.0;           // valid when standardized
    double sd = 1.0;

    bool operator==(const ColumnMeta&) const = default;
};

std::string column_label(const ColumnMeta& meta);

struct DesignMatrix {
    Matrix values;
    std::vector<ColumnMeta> columns;
    std::vector<std::size_t> row_index;  // position of each row's trial in the source list
};

// Encodes trials under the given feature set. Numeric features map to one
// column each; L and G_d/G_p expand to their full fixed category domains,
// pair_id to the observed pair ids sorted lexicographically. dSVO/dAISS are
// derived on the fly. Column order follows the feature set's declared order.
DesignMatrix encode(const std::vector<Trial>& trials, const FeatureSetSpec& spec);

// Re-encodes trials against an existing column layout (e.g. the snapshot a
// model was trained with). A category with no column throws EncodingError
// naming the feature and category.
DesignMatrix encode_with_columns(const std::vector<Trial>& trials,
                                 const std::vector<ColumnMeta>& columns);

DesignMatrix select_rows(const DesignMatrix& dm, const std::vector<std::size_t>& rows);

// Per-column z-score parameters fitted on a training row subset; one-hot
// columns are exempt. sd is clamped below at kSdFloor.
struct Standardizer {
    static constexpr double kSdFloor = 1e-12;

    std::vector<ColumnMeta> columns;  // layout this standardizer was fitted on
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<bool> scaled;
};

Standardizer fit_standardizer(const DesignMatrix& dm, const std::vector<std::size_t>& train_rows);

// (x - mean) / sd on every scaled column. Apply once: the result's columns
// carry the scaling and no longer match the standardizer's input layout.
DesignMatrix apply_standardizer(const Standardizer& std, const DesignMatrix& dm);

// Recovers the category of a one-hot group for one row (the group's hot
// column). Throws if the feature has no one-hot columns.
std::string decode_one_hot(const DesignMatrix& dm, std::size_t row, FeatureId feature);

// Debug dump with a column_meta header row.
void dump_matrix_csv(const DesignMatrix& dm, const std::filesystem::path& path);

}  // namespace pedcross

#include "pedcross/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "pedcross/csv_io.hpp"

namespace pedcross {

namespace {

bool is_one_hot_feature(FeatureId f) {
    return f == FeatureId::L || f == FeatureId::Gd || f == FeatureId::Gp ||
           f == FeatureId::PairId;
}

// Category domains: closed enums use their declaration order (zebra before
// non_zebra, F before M); the open pair_id domain is whatever the dataset
// contains, sorted lexicographically.
std::vector<std::string> categories_for(FeatureId f, const std::vector<Trial>& trials) {
    switch (f) {
        case FeatureId::L:
            return {"zebra", "non_zebra"};
        case FeatureId::Gd:
        case FeatureId::Gp:
            return {"F", "M"};
        case FeatureId::PairId: {
            std::set<std::string> ids;
            for (const Trial& t : trials) ids.insert(t.pair_id);
            return {ids.begin(), ids.end()};
        }
        default:
            throw Error("categories_for: not a categorical feature");
    }
}

std::string category_of(FeatureId f, const Trial& t) {
    switch (f) {
        case FeatureId::L: return to_string(t.location);
        case FeatureId::Gd: return to_string(t.driver.gender);
        case FeatureId::Gp: return to_string(t.pedestrian.gender);
        case FeatureId::PairId: return t.pair_id;
        default: throw Error("category_of: not a categorical feature");
    }
}

double numeric_value(FeatureId f, const Trial& t) {
    switch (f) {
        case FeatureId::Ta: return t.tta;
        case FeatureId::Tw: return t.waiting_time;
        case FeatureId::Ad: return static_cast<double>(t.driver.age);
        case FeatureId::Ap: return static_cast<double>(t.pedestrian.age);
        case FeatureId::SvoD: return t.driver.svo;
        case FeatureId::SvoP: return t.pedestrian.svo;
        case FeatureId::AissD: return t.driver.aiss;
        case FeatureId::AissP: return t.pedestrian.aiss;
        case FeatureId::DSvo: return derive_delta_features(t).dsvo;
        case FeatureId::DAiss: return derive_delta_features(t).daiss;
        default: throw Error("numeric_value: not a numeric feature");
    }
}

DesignMatrix encode_against(const std::vector<Trial>& trials,
                            const std::vector<ColumnMeta>& columns) {
    DesignMatrix dm;
    dm.columns = columns;
    dm.values = Matrix(trials.size(), columns.size());
    dm.row_index.resize(trials.size());

    for (std::size_t i = 0; i < trials.size(); ++i) {
        dm.row_index[i] = i;
        const Trial& t = trials[i];
        // Track which one-hot features found their category on this row.
        std::vector<bool> matched(columns.size(), false);
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const ColumnMeta& m = columns[j];
            if (m.one_hot) {
                if (category_of(m.feature, t) == m.category) {
                    dm.values.at(i, j) = 1.0;
                    matched[j] = true;
                }
            } else {
                double v = numeric_value(m.feature, t);
                if (!std::isfinite(v)) {
                    throw EncodingError("non-finite value for feature " + to_string(m.feature));
                }
                // Columns from a fitted snapshot carry their scaling; re-apply
                // it so fresh rows land in the space the model trained in.
                if (m.standardized) v = (v - m.mean) / m.sd;
                dm.values.at(i, j) = v;
            }
        }
        // Every one-hot feature must light exactly one column.
        std::set<FeatureId> groups;
        for (const ColumnMeta& m : columns) {
            if (m.one_hot) groups.insert(m.feature);
        }
        for (FeatureId g : groups) {
            bool hit = false;
            for (std::size_t j = 0; j < columns.size(); ++j) {
                if (columns[j].one_hot && columns[j].feature == g && matched[j]) hit = true;
            }
            if (!hit) {
                throw EncodingError("unknown category '" + category_of(g, t) +
                                    "' for feature " + to_string(g));
            }
        }
    }
    return dm;
}

}  // namespace

std::string column_label(const ColumnMeta& meta) {
    std::string label = to_string(meta.feature);
    if (meta.one_hot) label += "=" + meta.category;
    if (meta.standardized) {
        label += "[mean=" + format_double(meta.mean) + ";sd=" + format_double(meta.sd) + "]";
    }
    return label;
}

DesignMatrix encode(const std::vector<Trial>& trials, const FeatureSetSpec& spec) {
    std::vector<ColumnMeta> columns;
    for (FeatureId f : spec.columns) {
        if (is_one_hot_feature(f)) {
            for (const std::string& cat : categories_for(f, trials)) {
                ColumnMeta m;
                m.feature = f;
                m.category = cat;
                m.one_hot = true;
                columns.push_back(std::move(m));
            }
        } else {
            ColumnMeta m;
            m.feature = f;
            columns.push_back(std::move(m));
        }
    }
    return encode_against(trials, columns);
}

DesignMatrix encode_with_columns(const std::vector<Trial>& trials,
                                 const std::vector<ColumnMeta>& columns) {
    return encode_against(trials, columns);
}

DesignMatrix select_rows(const DesignMatrix& dm, const std::vector<std::size_t>& rows) {
    DesignMatrix out;
    out.columns = dm.columns;
    out.values = Matrix(rows.size(), dm.values.cols());
    out.row_index.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t src = rows[i];
        out.row_index[i] = dm.row_index[src];
        for (std::size_t j = 0; j < dm.values.cols(); ++j) {
            out.values.at(i, j) = dm.values.at(src, j);
        }
    }
    return out;
}

Standardizer fit_standardizer(const DesignMatrix& dm,
                              const std::vector<std::size_t>& train_rows) {
    if (train_rows.empty()) throw Error("fit_standardizer: empty training row set");
    Standardizer s;
    s.columns = dm.columns;
    const std::size_t d = dm.values.cols();
    s.mean.assign(d, 0.0);
    s.sd.assign(d, 1.0);
    s.scaled.assign(d, false);

    const double n = static_cast<double>(train_rows.size());
    for (std::size_t j = 0; j < d; ++j) {
        if (dm.columns[j].one_hot) continue;
        s.scaled[j] = true;
        double sum = 0.0;
        for (std::size_t r : train_rows) sum += dm.values.at(r, j);
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t r : train_rows) {
            const double delta = dm.values.at(r, j) - mean;
            ss += delta * delta;
        }
        s.mean[j] = mean;
        s.sd[j] = std::max(std::sqrt(ss / n), Standardizer::kSdFloor);
    }
    return s;
}

DesignMatrix apply_standardizer(const Standardizer& std_, const DesignMatrix& dm) {
    if (std_.columns != dm.columns) {
        throw ShapeError("apply_standardizer: column metadata mismatch");
    }
    DesignMatrix out = dm;
    for (std::size_t j = 0; j < dm.values.cols(); ++j) {
        if (!std_.scaled[j]) continue;
        for (std::size_t i = 0; i < dm.values.rows(); ++i) {
            out.values.at(i, j) = (dm.values.at(i, j) - std_.mean[j]) / std_.sd[j];
        }
        out.columns[j].standardized = true;
        out.columns[j].mean = std_.mean[j];
        out.columns[j].sd = std_.sd[j];
    }
    return out;
}

std::string decode_one_hot(const DesignMatrix& dm, std::size_t row, FeatureId feature) {
    double best = -1.0;
    const ColumnMeta* best_meta = nullptr;
    for (std::size_t j = 0; j < dm.columns.size(); ++j) {
        const ColumnMeta& m = dm.columns[j];
        if (!m.one_hot || m.feature != feature) continue;
        if (dm.values.at(row, j) > best) {
            best = dm.values.at(row, j);
            best_meta = &m;
        }
    }
    if (!best_meta) throw Error("decode_one_hot: no one-hot columns for " + to_string(feature));
    return best_meta->category;
}

void dump_matrix_csv(const DesignMatrix& dm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (std::size_t j = 0; j < dm.columns.size(); ++j) {
        if (j) out << ',';
        out << column_label(dm.columns[j]);
    }
    out << '\n';
    for (std::size_t i = 0; i < dm.values.rows(); ++i) {
        for (std::size_t j = 0; j < dm.values.cols(); ++j) {
            if (j) out << ',';
            out << format_double(dm.values.at(i, j));
        }
        out << '\n';
    }
}

}  // namespace pedcross

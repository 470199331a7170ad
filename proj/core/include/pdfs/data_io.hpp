#pragma once

#include "pdfs/classify.hpp"
#include "pdfs/matrix.hpp"
#include "pdfs/model.hpp"
#include "pdfs/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdfs {

struct Dataset {
    Matrix x;
    std::vector<int> labels;
    std::vector<std::string> feature_names; // may be empty
    std::vector<std::string> class_names;   // class_names[c] is the raw label of class c

    int num_classes() const;
};

/// Simulated expression data: class c gets mean `separation * class_scales[c]`
/// on its own block of s features [c s, (c + 1) s), zero elsewhere, plus
/// Gaussian noise, then each entry is zeroed with probability dropout_rate.
/// Sample i belongs to class i mod k.
struct SyntheticSpec {
    Index m = 200;
    Index d = 1000;
    int k = 4;
    Index s = 20;
    double separation = 2.0;
    double noise_sd = 1.0;
    double dropout_rate = 0.3;
    std::uint64_t seed = 0;
    std::vector<double> class_scales; // empty means all ones
};

Dataset generate_synthetic(const SyntheticSpec& spec);

/// The informative block of class c.
std::vector<Index> informative_features(const SyntheticSpec& spec, int c);

struct CsvOptions {
    std::string label_column = "label";
    std::optional<std::size_t> label_index; // takes precedence over the name
    char delimiter = ',';
};

/// Header row required. Every non-label column must be numeric and finite.
/// Labels are encoded in order of first appearance. Errors name the row and column.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {}, const std::string& source = "<stream>");

/// Writes features then a `label` column holding class_names (or class indices).
void write_csv(const std::filesystem::path& path, const Dataset& data, char delimiter = ',');
void write_csv(std::ostream& out, const Dataset& data, char delimiter = ',');

/// Headerless numeric matrix.
Matrix read_matrix_csv(const std::filesystem::path& path, char delimiter = ',');
Matrix parse_matrix_csv(std::istream& in, char delimiter = ',', const std::string& source = "<stream>");
void write_matrix_csv(const std::filesystem::path& path, const Matrix& a, char delimiter = ',');
void write_matrix_csv(std::ostream& out, const Matrix& a, char delimiter = ',');

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Binary container: magic, version, ball, loss, scale, shapes, then W and mu
/// as little-endian doubles. Round-trips bit-exactly.
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);

/// eta,n_features,accuracy,acc_class_0..acc_class_{k-1}; 9 significant digits.
void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> curve, int k);
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve, int k);

/// One row per recorded iterate. Wall times are left out so identical runs
/// produce identical files.
void write_history_csv(const std::filesystem::path& path, const TrainingHistory& history);
void write_history_csv(std::ostream& out, const TrainingHistory& history);

} // namespace pdfs

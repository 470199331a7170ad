#include "pdfs/data_io.hpp"

#include "pdfs/error.hpp"
#include "pdfs/random.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace pdfs {
namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

void finish(std::ostream& out, const std::string& what) {
    out.flush();
    if (!out) throw IoError("write failed: " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool blank(std::string_view line) {
    return trim(line).empty();
}

// Rows and columns in messages are 1-based as in a spreadsheet; row 1 is the header.
double parse_cell(std::string_view cell, const std::string& source, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    std::ostringstream os;
    if (cell.empty() || ec != std::errc() || ptr != last) {
        os << source << ": non-numeric value '" << cell << "' at row " << row << ", column " << col;
        throw IoError(os.str());
    }
    if (!std::isfinite(v)) {
        os << source << ": non-finite value '" << cell << "' at row " << row << ", column " << col;
        throw IoError(os.str());
    }
    return v;
}

std::string format_g(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Little-endian encoding independent of the host byte order.
template <class T>
void put(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw IoError(std::string("model file truncated while reading ") + what);
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

constexpr char kMagic[8] = {'P', 'D', 'F', 'S', 'M', 'D', 'L', '\0'};

} // namespace

int Dataset::num_classes() const {
    if (!class_names.empty()) return static_cast<int>(class_names.size());
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<Index> informative_features(const SyntheticSpec& spec, int c) {
    std::vector<Index> out(static_cast<std::size_t>(spec.s));
    for (Index j = 0; j < spec.s; ++j) out[static_cast<std::size_t>(j)] = c * spec.s + j;
    return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.k < 2) throw InvalidArgument("generate_synthetic: need k >= 2");
    if (spec.m < spec.k) throw InvalidArgument("generate_synthetic: need m >= k");
    if (spec.s < 1 || spec.s * spec.k > spec.d) {
        throw InvalidArgument("generate_synthetic: need 1 <= s and s * k <= d");
    }
    if (!(spec.separation > 0.0)) throw InvalidArgument("generate_synthetic: separation must be positive");
    if (!(spec.noise_sd >= 0.0)) throw InvalidArgument("generate_synthetic: noise_sd must be nonnegative");
    if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0)) {
        throw InvalidArgument("generate_synthetic: dropout_rate must lie in [0, 1)");
    }
    if (!spec.class_scales.empty() && spec.class_scales.size() != static_cast<std::size_t>(spec.k)) {
        throw InvalidArgument("generate_synthetic: class_scales needs one entry per class");
    }

    Dataset data;
    data.x = Matrix::Zero(spec.m, spec.d);
    data.labels.resize(static_cast<std::size_t>(spec.m));
    for (Index i = 0; i < spec.m; ++i) {
        const int c = static_cast<int>(i % spec.k);
        data.labels[static_cast<std::size_t>(i)] = c;
        const double mean =
            spec.separation * (spec.class_scales.empty() ? 1.0 : spec.class_scales[static_cast<std::size_t>(c)]);
        CounterRng rng(spec.seed, static_cast<std::uint64_t>(i));
        for (Index j = 0; j < spec.d; ++j) {
            const bool informative = j >= c * spec.s && j < (c + 1) * spec.s;
            double v = (informative ? mean : 0.0) + spec.noise_sd * rng.normal();
            if (rng.uniform() < spec.dropout_rate) v = 0.0;
            data.x(i, j) = v;
        }
    }
    data.feature_names.reserve(static_cast<std::size_t>(spec.d));
    for (Index j = 0; j < spec.d; ++j) data.feature_names.push_back("f" + std::to_string(j));
    for (int c = 0; c < spec.k; ++c) data.class_names.push_back(std::to_string(c));
    return data;
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) continue;
        for (auto h : split(line, options.delimiter)) header.emplace_back(h);
        break;
    }
    if (header.empty()) throw IoError(source + ": empty file");

    std::size_t label_col = header.size();
    if (options.label_index) {
        label_col = *options.label_index;
        if (label_col >= header.size()) {
            throw IoError(source + ": label column index " + std::to_string(label_col) +
                          " out of range (" + std::to_string(header.size()) + " columns)");
        }
    } else {
        const auto it = std::find(header.begin(), header.end(), options.label_column);
        if (it == header.end()) throw IoError(source + ": no label column named '" + options.label_column + "'");
        label_col = static_cast<std::size_t>(it - header.begin());
    }

    Dataset data;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_col) data.feature_names.push_back(header[c]);
    }
    std::map<std::string, int, std::less<>> codes;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) continue;
        const auto cells = split(line, options.delimiter);
        if (cells.size() != header.size()) {
            throw IoError(source + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                          " columns, header has " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_col) {
                const std::string key(cells[c]);
                if (key.empty()) throw IoError(source + ": empty label at row " + std::to_string(row));
                auto [it, inserted] = codes.try_emplace(key, static_cast<int>(data.class_names.size()));
                if (inserted) data.class_names.push_back(key);
                data.labels.push_back(it->second);
            } else {
                values.push_back(parse_cell(cells[c], source, row, c + 1));
            }
        }
    }
    if (data.labels.empty()) throw IoError(source + ": no data rows");

    const auto n = static_cast<Index>(data.labels.size());
    const auto d = static_cast<Index>(data.feature_names.size());
    data.x = Eigen::Map<const Matrix>(values.data(), n, d);
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    auto in = open_in(path);
    return parse_csv(in, options, path.string());
}

void write_csv(std::ostream& out, const Dataset& data, char delimiter) {
    if (static_cast<std::size_t>(data.x.rows()) != data.labels.size()) {
        throw InvalidArgument("write_csv: row count and label count differ");
    }
    for (Index j = 0; j < data.x.cols(); ++j) {
        const auto name = static_cast<std::size_t>(j) < data.feature_names.size()
                              ? data.feature_names[static_cast<std::size_t>(j)]
                              : "f" + std::to_string(j);
        out << name << delimiter;
    }
    out << "label\n";
    for (Index i = 0; i < data.x.rows(); ++i) {
        for (Index j = 0; j < data.x.cols(); ++j) out << format_g(data.x(i, j), 17) << delimiter;
        const int l = data.labels[static_cast<std::size_t>(i)];
        if (static_cast<std::size_t>(l) < data.class_names.size()) {
            out << data.class_names[static_cast<std::size_t>(l)];
        } else {
            out << l;
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Dataset& data, char delimiter) {
    auto out = open_out(path);
    write_csv(out, data, delimiter);
    finish(out, path.string());
}

Matrix parse_matrix_csv(std::istream& in, char delimiter, const std::string& source) {
    std::string line;
    std::vector<double> values;
    std::size_t row = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) continue;
        const auto cells = split(line, delimiter);
        if (rows == 0) cols = cells.size();
        if (cells.size() != cols) {
            throw IoError(source + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                          " columns, expected " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) values.push_back(parse_cell(cells[c], source, row, c + 1));
        ++rows;
    }
    if (rows == 0) throw IoError(source + ": empty file");
    return Eigen::Map<const Matrix>(values.data(), static_cast<Index>(rows), static_cast<Index>(cols));
}

Matrix read_matrix_csv(const std::filesystem::path& path, char delimiter) {
    auto in = open_in(path);
    return parse_matrix_csv(in, delimiter, path.string());
}

void write_matrix_csv(std::ostream& out, const Matrix& a, char delimiter) {
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            if (j > 0) out << delimiter;
            out << format_g(a(i, j), 17);
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& a, char delimiter) {
    auto out = open_out(path);
    write_matrix_csv(out, a, delimiter);
    finish(out, path.string());
}

void write_model(std::ostream& out, const TrainedModel& model) {
    const Index d = model.w.rows();
    const Index k = model.w.cols();
    require_shape(model.mu, k, k, "save_model: mu");
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kModelFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.ball.kind));
    put<double>(out, model.ball.radius);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.loss.kind));
    put<double>(out, model.loss.delta);
    put<double>(out, model.feature_scale);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(d));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(k));
    for (Index i = 0; i < model.w.size(); ++i) put<double>(out, model.w.data()[i]);
    for (Index i = 0; i < model.mu.size(); ++i) put<double>(out, model.mu.data()[i]);
}

TrainedModel read_model(std::istream& in) {
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic)) throw IoError("model file truncated while reading magic");
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IoError("not a model file (bad magic)");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kModelFormatVersion) {
        throw IoError("unsupported model format version " + std::to_string(version) + " (this build reads " +
                      std::to_string(kModelFormatVersion) + ")");
    }
    TrainedModel model;
    const auto ball = get<std::uint32_t>(in, "ball kind");
    if (ball > static_cast<std::uint32_t>(BallKind::Nuclear)) throw IoError("model file: unknown ball kind");
    model.ball.kind = static_cast<BallKind>(ball);
    model.ball.radius = get<double>(in, "radius");
    const auto loss = get<std::uint32_t>(in, "loss kind");
    if (loss > static_cast<std::uint32_t>(LossKind::Frobenius)) throw IoError("model file: unknown loss kind");
    model.loss.kind = static_cast<LossKind>(loss);
    model.loss.delta = get<double>(in, "delta");
    model.feature_scale = get<double>(in, "feature scale");
    const auto d = get<std::uint64_t>(in, "shape");
    const auto k = get<std::uint64_t>(in, "shape");
    constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
    if (d > kLimit || k > kLimit || (k > 0 && d > kLimit / k)) throw IoError("model file: implausible shape");
    model.w.resize(static_cast<Index>(d), static_cast<Index>(k));
    model.mu.resize(static_cast<Index>(k), static_cast<Index>(k));
    for (Index i = 0; i < model.w.size(); ++i) model.w.data()[i] = get<double>(in, "W");
    for (Index i = 0; i < model.mu.size(); ++i) model.mu.data()[i] = get<double>(in, "mu");
    if (in.peek() != std::char_traits<char>::eof()) throw IoError("model file: trailing bytes");
    return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    auto out = open_out(path, true);
    write_model(out, model);
    finish(out, path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    try {
        return read_model(in);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve, int k) {
    out << "eta,n_features,accuracy";
    for (int j = 0; j < k; ++j) out << ",acc_class_" << j;
    out << '\n';
    for (const auto& p : curve) {
        out << format_g(p.eta, 9) << ',' << p.n_features << ',' << format_g(p.accuracy, 9);
        for (int j = 0; j < k; ++j) {
            const double a = static_cast<std::size_t>(j) < p.per_class.size()
                                 ? p.per_class[static_cast<std::size_t>(j)]
                                 : std::nan("");
            out << ',' << (std::isnan(a) ? std::string("nan") : format_g(a, 9));
        }
        out << '\n';
    }
}

void write_curve_csv(const std::filesystem::path& path, std::span<const CurvePoint> curve, int k) {
    auto out = open_out(path);
    write_curve_csv(out, curve, k);
    finish(out, path.string());
}

void write_history_csv(std::ostream& out, const TrainingHistory& history) {
    out << "iter,data_term,center_penalty,elastic_term,total,constraint_violation,ergodic_total,gap_bound\n";
    for (const auto& e : history.entries) {
        const auto& o = e.objective;
        out << e.iter << ',' << format_g(o.data_term, 17) << ',' << format_g(o.center_penalty, 17) << ','
            << format_g(o.elastic_term, 17) << ',' << format_g(o.total, 17) << ','
            << format_g(o.constraint_violation, 17) << ',' << format_g(e.ergodic_objective.total, 17) << ','
            << format_g(e.gap_bound, 17) << '\n';
    }
}

void write_history_csv(const std::filesystem::path& path, const TrainingHistory& history) {
    auto out = open_out(path);
    write_history_csv(out, history);
    finish(out, path.string());
}

} // namespace pdfs

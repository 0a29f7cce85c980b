#include "lrbs/data.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "lrbs/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "the model file format assumes a little-endian host");

namespace lrbs {

namespace fs = std::filesystem;

namespace {

constexpr char kModelMagic[5] = {'L', 'R', 'B', 'S', '1'};

std::string loc(const fs::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    while (end && *end == ' ')
        ++end;
    return end != begin && end && *end == '\0';
}

std::vector<std::vector<double>> read_csv_rows(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double value = 0.0;
            if (!parse_double(cell, value))
                throw IoError(loc(path, lineno) + ": cannot parse '" + cell + "' as a number");
            if (!std::isfinite(value))
                throw IoError(loc(path, lineno) + ": non-finite value '" + cell + "'");
            row.push_back(value);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(loc(path, lineno) + ": expected " +
                          std::to_string(rows.front().size()) + " columns, found " +
                          std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw IoError(path.string() + ": no samples");
    return rows;
}

std::vector<int> read_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const char* begin = line.c_str();
        char* end = nullptr;
        long value = std::strtol(begin, &end, 10);
        while (end && *end == ' ')
            ++end;
        if (end == begin || !end || *end != '\0')
            throw IoError(loc(path, lineno) + ": cannot parse '" + line + "' as an integer");
        labels.push_back(static_cast<int>(value));
    }
    return labels;
}

// --- binary helpers -------------------------------------------------------

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void write_u32(std::ofstream& out, std::uint32_t v) { write_bytes(out, &v, sizeof v); }
void write_u8(std::ofstream& out, std::uint8_t v) { write_bytes(out, &v, sizeof v); }
void write_f64(std::ofstream& out, double v) { write_bytes(out, &v, sizeof v); }

void write_matrix(std::ofstream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            write_f64(out, m(i, j));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n, const fs::path& path) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
        throw IoError(path.string() + ": truncated model file");
}

std::uint32_t read_u32(std::ifstream& in, const fs::path& path) {
    std::uint32_t v = 0;
    read_bytes(in, &v, sizeof v, path);
    return v;
}

std::uint8_t read_u8(std::ifstream& in, const fs::path& path) {
    std::uint8_t v = 0;
    read_bytes(in, &v, sizeof v, path);
    return v;
}

double read_f64(std::ifstream& in, const fs::path& path) {
    double v = 0.0;
    read_bytes(in, &v, sizeof v, path);
    return v;
}

Matrix read_matrix(std::ifstream& in, Index rows, Index cols, const fs::path& path) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = read_f64(in, path);
    if (!m.allFinite())
        throw IoError(path.string() + ": model contains non-finite values");
    return m;
}

constexpr std::uint32_t kMaxDim = 1u << 24; // sanity bound on stored dimensions

Index checked_dim(std::uint32_t v, const fs::path& path, const char* what) {
    if (v == 0 || v > kMaxDim)
        throw IoError(path.string() + ": implausible " + what + " " + std::to_string(v));
    return static_cast<Index>(v);
}

void write_pca(std::ofstream& out, const PcaProjection& p) {
    write_u32(out, static_cast<std::uint32_t>(p.mean.size()));
    write_u32(out, static_cast<std::uint32_t>(p.basis.cols()));
    write_f64(out, p.retained_energy);
    for (Index i = 0; i < p.mean.size(); ++i)
        write_f64(out, p.mean(i));
    write_matrix(out, p.basis);
}

PcaProjection read_pca(std::ifstream& in, const fs::path& path) {
    const Index dim = checked_dim(read_u32(in, path), path, "PCA dimension");
    const Index k = checked_dim(read_u32(in, path), path, "PCA component count");
    if (k > dim)
        throw IoError(path.string() + ": PCA keeps more components than dimensions");
    PcaProjection p;
    p.retained_energy = read_f64(in, path);
    p.mean.resize(dim);
    for (Index i = 0; i < dim; ++i)
        p.mean(i) = read_f64(in, path);
    p.basis = read_matrix(in, dim, k, path);
    return p;
}

} // namespace

void validate(const SyntheticSpec& spec) {
    if (spec.latent_dim <= 0 || spec.dim_x <= 0 || spec.dim_z <= 0 ||
        spec.per_class_train <= 0 || spec.per_class_test <= 0)
        throw ValidationError("SyntheticSpec: all counts must be positive");
    if (spec.classes < 2)
        throw ValidationError(
            "SyntheticSpec: need at least 2 classes to form dissimilar pairs");
    if (spec.latent_dim > spec.dim_x || spec.latent_dim > spec.dim_z)
        throw ValidationError(
            "SyntheticSpec: latent_dim cannot exceed either feature dimension");
    if (spec.noise_sigma < 0.0)
        throw ValidationError("SyntheticSpec: noise_sigma must be nonnegative");
}

LabeledModality load_modality(const fs::path& features_path, const fs::path& labels_path) {
    std::vector<std::vector<double>> rows = read_csv_rows(features_path);
    std::vector<int> labels = read_labels(labels_path);
    if (labels.size() != rows.size())
        throw IoError(features_path.string() + " has " + std::to_string(rows.size()) +
                      " samples but " + labels_path.string() + " has " +
                      std::to_string(labels.size()) + " labels");

    const Index dim = static_cast<Index>(rows.front().size());
    const Index count = static_cast<Index>(rows.size());
    Matrix features(dim, count);
    for (Index s = 0; s < count; ++s)
        for (Index d = 0; d < dim; ++d)
            features(d, s) = rows[s][d];
    return {std::move(features), std::move(labels)};
}

void save_modality(const LabeledModality& m, const fs::path& features_path,
                   const fs::path& labels_path) {
    validate_modality(m, "save_modality");
    std::ofstream feat(features_path);
    if (!feat)
        throw IoError("cannot write " + features_path.string());
    char buf[64];
    for (Index s = 0; s < m.features.cols(); ++s) {
        for (Index d = 0; d < m.features.rows(); ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.features(d, s));
            feat << (d ? "," : "") << buf;
        }
        feat << "\n";
    }
    if (!feat.good())
        throw IoError("write failed for " + features_path.string());

    std::ofstream lab(labels_path);
    if (!lab)
        throw IoError("cannot write " + labels_path.string());
    for (int label : m.labels)
        lab << label << "\n";
    if (!lab.good())
        throw IoError("write failed for " + labels_path.string());
}

DatasetBundle generate_synthetic(const SyntheticSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto randn = [&](Index r, Index c) {
        Matrix m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j)
                m(i, j) = gauss(rng);
        return m;
    };

    // Orthonormalize the embedding maps so features keep the latent scale;
    // a raw Gaussian map would inflate norms by ~sqrt(dim) and detach the
    // data from the optimizer's unit-scale step-size defaults.
    auto embedding = [&](Index rows, Index cols) {
        Eigen::HouseholderQR<Matrix> qr(randn(rows, cols));
        return Matrix(qr.householderQ() * Matrix::Identity(rows, cols));
    };

    const Matrix centers = randn(spec.latent_dim, spec.classes);
    const Matrix map_x = embedding(spec.dim_x, spec.latent_dim);
    const Matrix map_z = embedding(spec.dim_z, spec.latent_dim);

    auto draw = [&](const Matrix& map, int per_class) {
        const Index count = static_cast<Index>(per_class) * spec.classes;
        LabeledModality mod;
        mod.features.resize(map.rows(), count);
        mod.labels.resize(count);
        for (Index s = 0; s < count; ++s) {
            const int cls = static_cast<int>(s % spec.classes);
            Vector latent = centers.col(cls);
            for (Index d = 0; d < latent.size(); ++d)
                latent(d) += spec.noise_sigma * gauss(rng);
            mod.features.col(s) = map * latent;
            mod.labels[s] = cls;
        }
        return mod;
    };

    DatasetBundle bundle;
    bundle.train_x = draw(map_x, spec.per_class_train);
    bundle.train_z = draw(map_z, spec.per_class_train);
    bundle.test_x = draw(map_x, spec.per_class_test);
    bundle.test_z = draw(map_z, spec.per_class_test);
    bundle.name = "synthetic-c" + std::to_string(spec.classes) + "-k" +
                  std::to_string(spec.latent_dim) + "-seed" + std::to_string(spec.seed);
    return bundle;
}

void save_model(const SimilarityModel& model, const fs::path& path) {
    if (!model.m.allFinite())
        throw ValidationError("save_model: M contains NaN or Inf");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());

    write_bytes(out, kModelMagic, sizeof kModelMagic);
    write_u32(out, static_cast<std::uint32_t>(model.m.rows()));
    write_u32(out, static_cast<std::uint32_t>(model.m.cols()));
    write_f64(out, model.lambda);
    write_u8(out, model.pca_x ? 1 : 0);
    write_u8(out, model.pca_z ? 1 : 0);
    if (model.pca_x)
        write_pca(out, *model.pca_x);
    if (model.pca_z)
        write_pca(out, *model.pca_z);
    write_matrix(out, model.m);
    write_u32(out, static_cast<std::uint32_t>(model.metadata.size()));
    for (const std::string& s : model.metadata) {
        write_u32(out, static_cast<std::uint32_t>(s.size()));
        write_bytes(out, s.data(), s.size());
    }
    if (!out.good())
        throw IoError("write failed for " + path.string());
}

SimilarityModel load_model(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());

    char magic[sizeof kModelMagic] = {};
    in.read(magic, sizeof magic);
    if (in.gcount() != static_cast<std::streamsize>(sizeof magic) ||
        !std::equal(std::begin(magic), std::end(magic), std::begin(kModelMagic)))
        throw IoError(path.string() + ": not an LRBS model file");

    SimilarityModel model;
    const Index d1 = checked_dim(read_u32(in, path), path, "row count");
    const Index d2 = checked_dim(read_u32(in, path), path, "column count");
    model.lambda = read_f64(in, path);
    const bool has_px = read_u8(in, path) != 0;
    const bool has_pz = read_u8(in, path) != 0;
    if (has_px)
        model.pca_x = read_pca(in, path);
    if (has_pz)
        model.pca_z = read_pca(in, path);
    model.m = read_matrix(in, d1, d2, path);

    if (model.pca_x && model.pca_x->components() != d1)
        throw IoError(path.string() + ": x projection keeps " +
                      std::to_string(model.pca_x->components()) + " components but M has " +
                      std::to_string(d1) + " rows");
    if (model.pca_z && model.pca_z->components() != d2)
        throw IoError(path.string() + ": z projection keeps " +
                      std::to_string(model.pca_z->components()) + " components but M has " +
                      std::to_string(d2) + " columns");

    const std::uint32_t n_meta = read_u32(in, path);
    if (n_meta > 4096)
        throw IoError(path.string() + ": implausible metadata count");
    model.metadata.reserve(n_meta);
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        const std::uint32_t len = read_u32(in, path);
        if (len > (1u << 20))
            throw IoError(path.string() + ": implausible metadata length");
        std::string s(len, '\0');
        read_bytes(in, s.data(), len, path);
        model.metadata.push_back(std::move(s));
    }
    return model;
}

} // namespace lrbs

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "lrbs/optimizer.hpp"
#include "lrbs/pairs.hpp"

namespace lrbs {

/// Train/test splits of two modalities over a shared class universe.
struct DatasetBundle {
    LabeledModality train_x;
    LabeledModality train_z;
    LabeledModality test_x;
    LabeledModality test_z;
    std::string name;
};

/// Parameters of the synthetic shared-latent-space generator.
struct SyntheticSpec {
    int classes = 5;
    int latent_dim = 4;
    int dim_x = 30;
    int dim_z = 20;
    int per_class_train = 20;
    int per_class_test = 10;
    double noise_sigma = 0.3;
    std::uint64_t seed = 42;
};

void validate(const SyntheticSpec& spec);

/// Read a feature CSV (one sample per row) and a label file (one integer
/// per line). The features come back transposed to dim x count.
LabeledModality load_modality(const std::filesystem::path& features_path,
                              const std::filesystem::path& labels_path);

/// Inverse of load_modality; decimals carry 17 significant digits so the
/// round trip is exact.
void save_modality(const LabeledModality& m, const std::filesystem::path& features_path,
                   const std::filesystem::path& labels_path);

/// Draw class centers in a shared latent space, embed them into each
/// modality through a fixed random orthonormal map (so features keep the
/// latent scale), and add latent-space Gaussian noise per sample. Sample i
/// carries class i mod classes, so every contiguous block of the dataset
/// is class balanced. Deterministic for a fixed seed.
DatasetBundle generate_synthetic(const SyntheticSpec& spec);

/// Binary model container, magic "LRBS1", little-endian payloads.
void save_model(const SimilarityModel& model, const std::filesystem::path& path);
SimilarityModel load_model(const std::filesystem::path& path);

} // namespace lrbs

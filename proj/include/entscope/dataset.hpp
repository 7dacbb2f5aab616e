#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entscope/qsim.hpp"
#include "entscope/structures.hpp"

namespace entscope::dataset {

inline constexpr int kSchemaVersion = 1;

/// Pool of global measurement operators. The first three entries are always
/// Z^n, X^n, Y^n; the remainder are distinct strings drawn by stratified
/// sampling over the (#X, #Y, #Z) type vector.
struct MeasurementPool {
    int n = 0;
    std::vector<qsim::PauliString> strings;
    std::uint64_t seed = 0;

    int size() const { return static_cast<int>(strings.size()); }
};

/// One measurement view: the one-hot encoded Pauli string (length 3n)
/// followed by its outcome distribution (length 2^n).
struct EncodedView {
    std::vector<double> pauli_code;
    std::vector<double> probs;

    /// Concatenated model input of length 3n + 2^n.
    std::vector<double> feature() const;
};

/// Labeled state instance with its K views; the dataset unit.
struct SampleRecord {
    int n = 0;
    structures::Composition composition;
    std::string label;
    int class_id = 0;
    std::vector<EncodedView> views;
    std::uint64_t sample_seed = 0;
};

struct DatasetManifest {
    int schema_version = kSchemaVersion;
    int n = 0;
    std::vector<std::string> class_labels;  // class_id -> label
    MeasurementPool pool;
    int k = 0;
    int samples_per_class = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t shots = 0;  // 0 = exact distributions
    std::array<double, 3> split_ratios{0.70, 0.15, 0.15};
};

/// Index partition of a record list into train/val/test.
struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

std::uint64_t pauli_pool_total(int n);  // 3^n
std::uint64_t default_pool_size(int n);

/**
 * Builds the measurement pool: [Z^n, X^n, Y^n] plus distinct strings from
 * stratified sampling. Strata are visited round-robin in decreasing stratum
 * size, one uniform draw without replacement per visit. With
 * pool_size == 3^n the pool is the full enumeration, specials first.
 */
MeasurementPool build_measurement_pool(int n, std::uint64_t pool_size,
                                       std::uint64_t seed);

/// One-hot per qubit, X -> (1,0,0), Y -> (0,1,0), Z -> (0,0,1), qubit-major.
std::vector<double> encode_pauli(const qsim::PauliString& p);
qsim::PauliString decode_pauli(const std::vector<double>& code);

/// Class table selection: full enumeration when it fits in max_classes,
/// otherwise sample_compositions(n, max_classes, seed).
std::vector<structures::Composition> default_class_table(
    int n, std::uint64_t max_classes, std::uint64_t seed);

DatasetManifest make_manifest(int n,
                              const std::vector<structures::Composition>& classes,
                              std::uint64_t pool_size, int k,
                              int samples_per_class, std::uint64_t master_seed,
                              std::uint64_t shots);

/**
 * Generates all records for the manifest, class-id major and sample-index
 * minor. Views are the first K pool entries; per-sample randomness enters
 * only through One-block states (and shot noise when shots > 0).
 */
std::vector<SampleRecord> generate_records(const DatasetManifest& manifest);

/**
 * Stratified split by class id, deterministic given seed. Per class of m
 * records: floor(m*r_train) train, floor(m*r_val) val, remainder test.
 * Requires >= 3 records per class.
 */
DatasetSplit split_dataset(const std::vector<SampleRecord>& records,
                           const std::array<double, 3>& ratios,
                           std::uint64_t seed);

/// Writes manifest.json and records.txt under dir (created if needed).
void write_dataset(const std::string& dir, const DatasetManifest& manifest,
                   const std::vector<SampleRecord>& records);

struct Dataset {
    DatasetManifest manifest;
    std::vector<SampleRecord> records;
};

Dataset read_dataset(const std::string& dir);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

std::string records_to_text(const std::vector<SampleRecord>& records);
std::vector<SampleRecord> records_from_text(const std::string& text,
                                            const DatasetManifest& manifest);

/// FNV-1a over the class table; binds checkpoints to a dataset's label order.
std::uint64_t class_table_hash(const std::vector<std::string>& labels);

/// ENTSCOPE_SEED environment override, when set and parseable.
std::optional<std::uint64_t> env_seed_override();

}  // namespace entscope::dataset

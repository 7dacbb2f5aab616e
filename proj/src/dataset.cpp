#include "entscope/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "entscope/common.hpp"
#include "entscope/rng.hpp"

namespace entscope::dataset {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kRecordsHeader = "#entscope-records:v1";
constexpr std::string_view kChecksumPrefix = "#checksum:fnv1a64:";

std::uint64_t binomial(int n, int k) {
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) /
            static_cast<std::uint64_t>(i);
    }
    return r;
}

// The (#X, #Y, #Z) type vector defines the stratification key.
struct Stratum {
    int cx, cy, cz;
    std::uint64_t size;
    std::unordered_set<std::string> chosen;
    std::vector<std::string> enumerated;  // filled lazily for small strata

    std::uint64_t remaining() const { return size - chosen.size(); }
};

void enumerate_multiset(int cx, int cy, int cz, std::string& cur,
                        std::vector<std::string>& out) {
    if (cx == 0 && cy == 0 && cz == 0) {
        out.push_back(cur);
        return;
    }
    if (cx > 0) {
        cur.push_back('X');
        enumerate_multiset(cx - 1, cy, cz, cur, out);
        cur.pop_back();
    }
    if (cy > 0) {
        cur.push_back('Y');
        enumerate_multiset(cx, cy - 1, cz, cur, out);
        cur.pop_back();
    }
    if (cz > 0) {
        cur.push_back('Z');
        enumerate_multiset(cx, cy, cz - 1, cur, out);
        cur.pop_back();
    }
}

std::string draw_from_stratum(Stratum& st, Rng& rng) {
    constexpr std::uint64_t kEagerEnumLimit = 4096;
    constexpr int kShuffleTries = 64;

    if (st.enumerated.empty() && st.size <= kEagerEnumLimit) {
        std::string cur;
        cur.reserve(static_cast<std::size_t>(st.cx + st.cy + st.cz));
        enumerate_multiset(st.cx, st.cy, st.cz, cur, st.enumerated);
    }
    if (st.enumerated.empty()) {
        std::string letters(static_cast<std::size_t>(st.cx), 'X');
        letters.append(static_cast<std::size_t>(st.cy), 'Y');
        letters.append(static_cast<std::size_t>(st.cz), 'Z');
        std::vector<char> word(letters.begin(), letters.end());
        for (int tries = 0; tries < kShuffleTries; ++tries) {
            rng.shuffle(word);
            std::string s(word.begin(), word.end());
            if (!st.chosen.count(s)) return s;
        }
        // Stratum is heavily exhausted; enumerate and draw by index.
        std::string cur;
        cur.reserve(word.size());
        enumerate_multiset(st.cx, st.cy, st.cz, cur, st.enumerated);
    }
    std::vector<const std::string*> open;
    open.reserve(st.enumerated.size() - st.chosen.size());
    for (const std::string& s : st.enumerated) {
        if (!st.chosen.count(s)) open.push_back(&s);
    }
    return *open[static_cast<std::size_t>(rng.next_below(open.size()))];
}

void check_pool_n(int n) {
    if (n < 1 || n > 24) {
        throw std::invalid_argument("qubit count out of range [1, 24]");
    }
}

std::vector<std::string_view> split_view(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(delim, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

void validate_manifest(const DatasetManifest& m) {
    if (m.schema_version != kSchemaVersion) {
        throw std::runtime_error("unsupported manifest schema version: " +
                                 std::to_string(m.schema_version));
    }
    check_pool_n(m.n);
    if (m.class_labels.empty()) {
        throw std::runtime_error("manifest has empty class table");
    }
    if (m.k < 1 || m.k > m.pool.size()) {
        throw std::runtime_error("K exceeds measurement pool size");
    }
    if (m.samples_per_class < 1) {
        throw std::runtime_error("samples_per_class must be >= 1");
    }
    double rsum = 0.0;
    for (double r : m.split_ratios) {
        if (r < 0.0) throw std::runtime_error("negative split ratio");
        rsum += r;
    }
    if (std::abs(rsum - 1.0) > 1e-9) {
        throw std::runtime_error("split ratios must sum to 1");
    }
}

}  // namespace

std::uint64_t pauli_pool_total(int n) {
    check_pool_n(n);
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    return total;
}

std::uint64_t default_pool_size(int n) {
    if (n <= 8) return pauli_pool_total(n);
    if (n <= 10) return 500;
    return 1000;
}

MeasurementPool build_measurement_pool(int n, std::uint64_t pool_size,
                                       std::uint64_t seed) {
    const std::uint64_t total = pauli_pool_total(n);
    if (pool_size < 3 || pool_size > total) {
        throw std::invalid_argument("pool size out of range [3, 3^n]");
    }

    MeasurementPool pool;
    pool.n = n;
    pool.seed = seed;
    pool.strings.push_back(qsim::PauliString::uniform(qsim::Axis::Z, n));
    pool.strings.push_back(qsim::PauliString::uniform(qsim::Axis::X, n));
    pool.strings.push_back(qsim::PauliString::uniform(qsim::Axis::Y, n));
    if (pool_size == 3) return pool;

    const std::string special_z(static_cast<std::size_t>(n), 'Z');
    const std::string special_x(static_cast<std::size_t>(n), 'X');
    const std::string special_y(static_cast<std::size_t>(n), 'Y');

    if (pool_size == total) {
        // Full enumeration, lexicographic with X < Y < Z, specials first.
        std::vector<int> digits(static_cast<std::size_t>(n), 0);
        std::string s(static_cast<std::size_t>(n), 'X');
        static const char kLetters[3] = {'X', 'Y', 'Z'};
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            for (int q = 0; q < n; ++q) {
                s[static_cast<std::size_t>(q)] =
                    kLetters[digits[static_cast<std::size_t>(q)]];
            }
            if (s != special_x && s != special_y && s != special_z) {
                pool.strings.push_back(qsim::PauliString::from_string(s));
            }
            for (int q = n - 1; q >= 0; --q) {
                if (++digits[static_cast<std::size_t>(q)] < 3) break;
                digits[static_cast<std::size_t>(q)] = 0;
            }
        }
        return pool;
    }

    std::vector<Stratum> strata;
    for (int cx = 0; cx <= n; ++cx) {
        for (int cy = 0; cy + cx <= n; ++cy) {
            const int cz = n - cx - cy;
            const std::uint64_t size =
                binomial(n, cx) * binomial(n - cx, cy);
            strata.push_back(Stratum{cx, cy, cz, size, {}, {}});
        }
    }
    std::sort(strata.begin(), strata.end(), [](const Stratum& a, const Stratum& b) {
        if (a.size != b.size) return a.size > b.size;
        return std::tie(a.cx, a.cy, a.cz) < std::tie(b.cx, b.cy, b.cz);
    });
    for (Stratum& st : strata) {
        if (st.cx == n) st.chosen.insert(special_x);
        if (st.cy == n) st.chosen.insert(special_y);
        if (st.cz == n) st.chosen.insert(special_z);
    }

    Rng rng(mix_seed(seed, seed_stream::kPool));
    std::uint64_t have = 3;
    while (have < pool_size) {
        bool drew_any = false;
        for (Stratum& st : strata) {
            if (have == pool_size) break;
            if (st.remaining() == 0) continue;
            std::string s = draw_from_stratum(st, rng);
            st.chosen.insert(s);
            pool.strings.push_back(qsim::PauliString::from_string(s));
            ++have;
            drew_any = true;
        }
        if (!drew_any) {
            throw std::logic_error("measurement pool draw exhausted");
        }
    }
    return pool;
}

std::vector<double> encode_pauli(const qsim::PauliString& p) {
    std::vector<double> code(static_cast<std::size_t>(3 * p.size()), 0.0);
    for (int q = 0; q < p.size(); ++q) {
        code[static_cast<std::size_t>(3 * q) +
             static_cast<std::size_t>(p.axis(q))] = 1.0;
    }
    return code;
}

qsim::PauliString decode_pauli(const std::vector<double>& code) {
    if (code.empty() || code.size() % 3 != 0) {
        throw std::invalid_argument("malformed encoding");
    }
    std::vector<qsim::Axis> axes;
    axes.reserve(code.size() / 3);
    for (std::size_t q = 0; q < code.size() / 3; ++q) {
        int hot = -1;
        for (int j = 0; j < 3; ++j) {
            const double v = code[3 * q + static_cast<std::size_t>(j)];
            if (v == 1.0) {
                if (hot >= 0) throw std::invalid_argument("malformed encoding");
                hot = j;
            } else if (v != 0.0) {
                throw std::invalid_argument("malformed encoding");
            }
        }
        if (hot < 0) throw std::invalid_argument("malformed encoding");
        axes.push_back(static_cast<qsim::Axis>(hot));
    }
    return qsim::PauliString(std::move(axes));
}

std::vector<double> EncodedView::feature() const {
    std::vector<double> f;
    f.reserve(pauli_code.size() + probs.size());
    f.insert(f.end(), pauli_code.begin(), pauli_code.end());
    f.insert(f.end(), probs.begin(), probs.end());
    return f;
}

std::vector<structures::Composition> default_class_table(
    int n, std::uint64_t max_classes, std::uint64_t seed) {
    if (max_classes < 1) {
        throw std::invalid_argument("max_classes must be >= 1");
    }
    const std::uint64_t total = structures::composition_count(n);
    if (total <= max_classes) return structures::enumerate_compositions(n);
    return structures::sample_compositions(n, max_classes, seed);
}

DatasetManifest make_manifest(int n,
                              const std::vector<structures::Composition>& classes,
                              std::uint64_t pool_size, int k,
                              int samples_per_class, std::uint64_t master_seed,
                              std::uint64_t shots) {
    DatasetManifest m;
    m.n = n;
    for (const auto& c : classes) {
        if (c.n() != n) {
            throw std::invalid_argument("composition does not partition n qubits");
        }
        m.class_labels.push_back(structures::composition_label(c));
    }
    m.pool = build_measurement_pool(n, pool_size,
                                    mix_seed(master_seed, seed_stream::kPool));
    m.k = k;
    m.samples_per_class = samples_per_class;
    m.master_seed = master_seed;
    m.shots = shots;
    validate_manifest(m);
    return m;
}

std::vector<SampleRecord> generate_records(const DatasetManifest& manifest) {
    validate_manifest(manifest);
    std::vector<SampleRecord> records;
    records.reserve(manifest.class_labels.size() *
                    static_cast<std::size_t>(manifest.samples_per_class));

    std::vector<std::vector<double>> codes;
    codes.reserve(static_cast<std::size_t>(manifest.k));
    for (int v = 0; v < manifest.k; ++v) {
        codes.push_back(encode_pauli(manifest.pool.strings[static_cast<std::size_t>(v)]));
    }

    for (std::size_t class_id = 0; class_id < manifest.class_labels.size();
         ++class_id) {
        const structures::Composition comp =
            structures::parse_label(manifest.class_labels[class_id]);
        const auto kinds = comp.block_kinds();
        const std::uint64_t class_seed =
            mix_seed(manifest.master_seed, seed_stream::kSample, class_id);
        for (int s = 0; s < manifest.samples_per_class; ++s) {
            SampleRecord rec;
            rec.n = manifest.n;
            rec.composition = comp;
            rec.label = manifest.class_labels[class_id];
            rec.class_id = static_cast<int>(class_id);
            rec.sample_seed = mix_seed(class_seed, static_cast<std::uint64_t>(s));
            const qsim::ProductState state =
                qsim::compose_product_state(kinds, rec.sample_seed);
            rec.views.reserve(static_cast<std::size_t>(manifest.k));
            for (int v = 0; v < manifest.k; ++v) {
                EncodedView view;
                view.pauli_code = codes[static_cast<std::size_t>(v)];
                view.probs = qsim::measurement_distribution(
                    state, manifest.pool.strings[static_cast<std::size_t>(v)]);
                if (manifest.shots > 0) {
                    view.probs = qsim::sample_shots(
                        view.probs, manifest.shots,
                        mix_seed(rec.sample_seed, seed_stream::kShots,
                                 static_cast<std::uint64_t>(v)));
                }
                rec.views.push_back(std::move(view));
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

DatasetSplit split_dataset(const std::vector<SampleRecord>& records,
                           const std::array<double, 3>& ratios,
                           std::uint64_t seed) {
    double rsum = 0.0;
    for (double r : ratios) {
        if (r < 0.0) throw std::invalid_argument("negative split ratio");
        rsum += r;
    }
    if (std::abs(rsum - 1.0) > 1e-9) {
        throw std::invalid_argument("split ratios must sum to 1");
    }

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < records.size(); ++i) {
        by_class[records[i].class_id].push_back(i);
    }

    DatasetSplit split;
    for (auto& [class_id, indices] : by_class) {
        const std::size_t m = indices.size();
        if (m < 3) {
            throw std::invalid_argument(
                "class too small for split: " +
                records[indices.front()].label);
        }
        Rng rng(mix_seed(seed, seed_stream::kSplit,
                         static_cast<std::uint64_t>(class_id)));
        rng.shuffle(indices);
        const auto n_train = static_cast<std::size_t>(
            std::floor(static_cast<double>(m) * ratios[0] + 1e-9));
        const auto n_val = static_cast<std::size_t>(
            std::floor(static_cast<double>(m) * ratios[1] + 1e-9));
        for (std::size_t i = 0; i < m; ++i) {
            if (i < n_train) {
                split.train.push_back(indices[i]);
            } else if (i < n_train + n_val) {
                split.val.push_back(indices[i]);
            } else {
                split.test.push_back(indices[i]);
            }
        }
    }
    return split;
}

std::string manifest_to_json(const DatasetManifest& m) {
    json j;
    j["schema_version"] = m.schema_version;
    j["n"] = m.n;
    j["class_labels"] = m.class_labels;
    json pool;
    pool["n"] = m.pool.n;
    pool["seed"] = m.pool.seed;
    json strings = json::array();
    for (const auto& p : m.pool.strings) strings.push_back(p.to_string());
    pool["strings"] = std::move(strings);
    j["pool"] = std::move(pool);
    j["k"] = m.k;
    j["samples_per_class"] = m.samples_per_class;
    j["master_seed"] = m.master_seed;
    j["shots"] = m.shots;
    j["split_ratios"] = m.split_ratios;
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed manifest: ") + e.what());
    }
    DatasetManifest m;
    try {
        m.schema_version = j.at("schema_version").get<int>();
        if (m.schema_version != kSchemaVersion) {
            throw std::runtime_error("unsupported manifest schema version: " +
                                     std::to_string(m.schema_version));
        }
        m.n = j.at("n").get<int>();
        m.class_labels = j.at("class_labels").get<std::vector<std::string>>();
        const json& pool = j.at("pool");
        m.pool.n = pool.at("n").get<int>();
        m.pool.seed = pool.at("seed").get<std::uint64_t>();
        for (const auto& s : pool.at("strings")) {
            m.pool.strings.push_back(
                qsim::PauliString::from_string(s.get<std::string>()));
        }
        m.k = j.at("k").get<int>();
        m.samples_per_class = j.at("samples_per_class").get<int>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.shots = j.at("shots").get<std::uint64_t>();
        const auto ratios = j.at("split_ratios").get<std::vector<double>>();
        if (ratios.size() != 3) {
            throw std::runtime_error("split_ratios must have 3 entries");
        }
        std::copy(ratios.begin(), ratios.end(), m.split_ratios.begin());
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed manifest: ") + e.what());
    }
    validate_manifest(m);
    return m;
}

std::string records_to_text(const std::vector<SampleRecord>& records) {
    std::string out(kRecordsHeader);
    out.push_back('\n');
    for (const SampleRecord& rec : records) {
        out += std::to_string(rec.class_id);
        out.push_back('|');
        out += rec.label;
        out.push_back('|');
        out += std::to_string(rec.sample_seed);
        out.push_back('|');
        out += std::to_string(rec.views.size());
        for (const EncodedView& v : rec.views) {
            out.push_back('|');
            out += decode_pauli(v.pauli_code).to_string();
            out.push_back(':');
            for (std::size_t i = 0; i < v.probs.size(); ++i) {
                if (i > 0) out.push_back(',');
                out += format_double(v.probs[i]);
            }
        }
        out.push_back('\n');
    }
    out += std::string(kChecksumPrefix) + to_hex(fnv1a64(out)) + "\n";
    return out;
}

std::vector<SampleRecord> records_from_text(const std::string& text,
                                            const DatasetManifest& manifest) {
    const std::size_t checksum_pos = text.rfind(kChecksumPrefix);
    if (checksum_pos == std::string::npos) {
        throw std::runtime_error("truncated dataset file: missing checksum");
    }
    const std::string_view payload(text.data(), checksum_pos);
    std::string_view checksum_line(text.data() + checksum_pos,
                                   text.size() - checksum_pos);
    if (!checksum_line.empty() && checksum_line.back() == '\n') {
        checksum_line.remove_suffix(1);
    }
    const std::uint64_t want =
        parse_hex_u64(checksum_line.substr(kChecksumPrefix.size()));
    if (fnv1a64(payload) != want) {
        throw std::runtime_error("dataset checksum failure");
    }

    std::vector<std::string_view> lines = split_view(payload, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) {
        throw std::runtime_error("truncated dataset file: missing header");
    }
    constexpr std::string_view kHeaderPrefix = "#entscope-records:v";
    if (lines.front().substr(0, kHeaderPrefix.size()) != kHeaderPrefix) {
        throw std::runtime_error("malformed records header");
    }
    if (lines.front() != kRecordsHeader) {
        throw std::runtime_error(
            "unsupported records schema version: " +
            std::string(lines.front().substr(kHeaderPrefix.size())));
    }

    const std::size_t dim = std::size_t{1} << manifest.n;
    std::vector<SampleRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto fields = split_view(lines[li], '|');
        if (fields.size() < 5) {
            throw std::runtime_error("malformed record at line " +
                                     std::to_string(li + 1));
        }
        SampleRecord rec;
        rec.n = manifest.n;
        rec.class_id = parse_int(fields[0]);
        rec.label = std::string(fields[1]);
        rec.sample_seed = parse_u64(fields[2]);
        const int k = parse_int(fields[3]);
        if (rec.class_id < 0 ||
            rec.class_id >= static_cast<int>(manifest.class_labels.size()) ||
            manifest.class_labels[static_cast<std::size_t>(rec.class_id)] !=
                rec.label) {
            throw std::runtime_error("record/class table mismatch at line " +
                                     std::to_string(li + 1));
        }
        if (k < 1 || fields.size() != static_cast<std::size_t>(k) + 4) {
            throw std::runtime_error("malformed record at line " +
                                     std::to_string(li + 1));
        }
        rec.composition = structures::parse_label(rec.label);
        for (int v = 0; v < k; ++v) {
            const std::string_view field = fields[static_cast<std::size_t>(v) + 4];
            const std::size_t colon = field.find(':');
            if (colon == std::string_view::npos) {
                throw std::runtime_error("malformed view at line " +
                                         std::to_string(li + 1));
            }
            EncodedView view;
            const qsim::PauliString pauli =
                qsim::PauliString::from_string(field.substr(0, colon));
            if (pauli.size() != manifest.n) {
                throw std::runtime_error("view arity mismatch at line " +
                                         std::to_string(li + 1));
            }
            view.pauli_code = encode_pauli(pauli);
            const auto values = split_view(field.substr(colon + 1), ',');
            if (values.size() != dim) {
                throw std::runtime_error("view length mismatch at line " +
                                         std::to_string(li + 1));
            }
            view.probs.reserve(dim);
            for (auto val : values) view.probs.push_back(parse_double(val));
            rec.views.push_back(std::move(view));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_dataset(const std::string& dir, const DatasetManifest& manifest,
                   const std::vector<SampleRecord>& records) {
    validate_manifest(manifest);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create directory " + dir + ": " +
                                 ec.message());
    }
    write_text_file((fs::path(dir) / "manifest.json").string(),
                    manifest_to_json(manifest));
    write_text_file((fs::path(dir) / "records.txt").string(),
                    records_to_text(records));
}

Dataset read_dataset(const std::string& dir) {
    Dataset ds;
    ds.manifest = manifest_from_json(
        read_text_file((fs::path(dir) / "manifest.json").string()));
    ds.records = records_from_text(
        read_text_file((fs::path(dir) / "records.txt").string()), ds.manifest);
    return ds;
}

std::uint64_t class_table_hash(const std::vector<std::string>& labels) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const std::string& label : labels) {
        h = fnv1a64(label, h);
        h = fnv1a64("\n", h);
    }
    return h;
}

std::optional<std::uint64_t> env_seed_override() {
    const char* env = std::getenv("ENTSCOPE_SEED");
    if (env == nullptr || *env == '\0') return std::nullopt;
    try {
        return parse_u64(env);
    } catch (const std::exception&) {
        throw std::runtime_error("malformed ENTSCOPE_SEED value");
    }
}

}  // namespace entscope::dataset

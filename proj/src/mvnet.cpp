#include "entscope/mvnet.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "entscope/common.hpp"

namespace entscope::mvnet {

namespace {

constexpr char kCheckpointMagic[8] = {'E', 'N', 'T', 'S', 'C', 'K', 'P', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_doubles(std::string& out, const std::vector<double>& v) {
    put_u64(out, v.size());
    const std::size_t bytes = v.size() * sizeof(double);
    const std::size_t at = out.size();
    out.resize(at + bytes);
    std::memcpy(out.data() + at, v.data(), bytes);
}

class Reader {
  public:
    explicit Reader(std::string_view buf) : buf_(buf) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(
                     static_cast<unsigned char>(buf_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(buf_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    std::vector<double> doubles() {
        const std::uint64_t count = u64();
        const std::size_t bytes = count * sizeof(double);
        need(bytes);
        std::vector<double> v(count);
        std::memcpy(v.data(), buf_.data() + pos_, bytes);
        pos_ += bytes;
        return v;
    }

    std::size_t pos() const { return pos_; }

  private:
    void need(std::size_t bytes) const {
        if (pos_ + bytes > buf_.size()) {
            throw std::runtime_error("corrupt checkpoint: truncated");
        }
    }
    std::string_view buf_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams<double>& params,
                     int n_qubits, std::uint64_t class_table_hash) {
    std::string payload;
    put_u32(payload, 1);  // schema
    put_u32(payload, static_cast<std::uint32_t>(n_qubits));
    put_u32(payload, static_cast<std::uint32_t>(params.n_classes));
    put_u32(payload, static_cast<std::uint32_t>(params.input_dim));
    put_u32(payload, static_cast<std::uint32_t>(params.hidden1));
    put_u32(payload, static_cast<std::uint32_t>(params.hidden2));
    put_u64(payload, class_table_hash);
    put_doubles(payload, params.w1.data);
    put_doubles(payload, params.b1);
    put_doubles(payload, params.w2.data);
    put_doubles(payload, params.b2);
    put_doubles(payload, params.w3.data);
    put_doubles(payload, params.b3);

    std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
    out += payload;
    put_u64(out, fnv1a64(payload));
    write_text_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
    const std::string raw = read_text_file(path);
    if (raw.size() < sizeof kCheckpointMagic + 8 ||
        std::memcmp(raw.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
        throw std::runtime_error("corrupt checkpoint: bad magic");
    }
    const std::string_view payload(raw.data() + sizeof kCheckpointMagic,
                                   raw.size() - sizeof kCheckpointMagic - 8);
    Reader tail(std::string_view(raw.data() + raw.size() - 8, 8));
    if (fnv1a64(payload) != tail.u64()) {
        throw std::runtime_error("corrupt checkpoint: checksum failure");
    }

    Reader r(payload);
    const std::uint32_t schema = r.u32();
    if (schema != 1) {
        throw std::runtime_error("unsupported checkpoint schema version: " +
                                 std::to_string(schema));
    }
    Checkpoint ck;
    ck.n_qubits = static_cast<int>(r.u32());
    ck.params.n_classes = static_cast<int>(r.u32());
    ck.params.input_dim = static_cast<int>(r.u32());
    ck.params.hidden1 = static_cast<int>(r.u32());
    ck.params.hidden2 = static_cast<int>(r.u32());
    ck.class_table_hash = r.u64();

    auto read_mat = [&r](Mat<double>& m, int rows, int cols) {
        m.rows = rows;
        m.cols = cols;
        m.data = r.doubles();
        if (m.data.size() != static_cast<std::size_t>(rows) *
                                 static_cast<std::size_t>(cols)) {
            throw std::runtime_error("corrupt checkpoint: tensor size mismatch");
        }
    };
    auto read_vec = [&r](std::vector<double>& v, int size) {
        v = r.doubles();
        if (v.size() != static_cast<std::size_t>(size)) {
            throw std::runtime_error("corrupt checkpoint: tensor size mismatch");
        }
    };
    read_mat(ck.params.w1, ck.params.hidden1, ck.params.input_dim);
    read_vec(ck.params.b1, ck.params.hidden1);
    read_mat(ck.params.w2, ck.params.hidden2, ck.params.hidden1);
    read_vec(ck.params.b2, ck.params.hidden2);
    read_mat(ck.params.w3, ck.params.n_classes, ck.params.hidden2);
    read_vec(ck.params.b3, ck.params.n_classes);
    return ck;
}

Checkpoint load_checkpoint(const std::string& path,
                           std::uint64_t expected_class_table_hash) {
    Checkpoint ck = load_checkpoint(path);
    if (ck.class_table_hash != expected_class_table_hash) {
        throw std::runtime_error(
            "class table hash mismatch: checkpoint was trained on a "
            "different dataset class table");
    }
    return ck;
}

double mean_precision(const Metrics& metrics) {
    double acc = 0.0;
    int defined = 0;
    for (double p : metrics.per_class_precision) {
        if (std::isnan(p)) continue;
        acc += p;
        ++defined;
    }
    return defined == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : acc / defined;
}

std::string history_to_csv(const std::vector<EpochStats>& history) {
    std::string out = "epoch,train_loss,ce,cont,lr,val_acc\n";
    for (const EpochStats& s : history) {
        out += std::to_string(s.epoch);
        out.push_back(',');
        out += format_double(s.train_loss);
        out.push_back(',');
        out += format_double(s.cross_entropy);
        out.push_back(',');
        out += format_double(s.contrastive);
        out.push_back(',');
        out += format_double(s.lr);
        out.push_back(',');
        out += format_double(s.val_accuracy);
        out.push_back('\n');
    }
    return out;
}

}  // namespace entscope::mvnet

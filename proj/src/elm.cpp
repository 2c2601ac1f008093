#include "elmfs/elm.hpp"

#include "elmfs/linalg.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace elmfs {

namespace {

constexpr std::array<std::uint8_t, 5> kMagic{'E', 'L', 'M', 'F', 'S'};
constexpr std::uint8_t kFormatVersion = 1;
constexpr Eigen::Index kTrainChunk = 4096;
constexpr double kSingularRcond = 16 * std::numeric_limits<double>::epsilon();

// Solves U (G + ridge I) = C for U given the Gram matrix G = H H^T and the
// cross term C = T H^T.
RMatrix solve_from_gram(RMatrix gram, const RMatrix& cross, double ridge, TrainReport* report) {
    TrainReport local;
    if (ridge > 0.0) {
        gram.diagonal().array() += ridge;
        Eigen::LDLT<RMatrix> ldlt(gram);
        local.reciprocal_condition = ldlt.rcond();
        RMatrix u = ldlt.solve(cross.transpose()).transpose();
        if (ldlt.info() == Eigen::Success && u.allFinite()) {
            if (report) *report = local;
            return u;
        }
    } else {
        Eigen::LLT<RMatrix> llt(gram);
        if (llt.info() == Eigen::Success && llt.rcond() > kSingularRcond) {
            local.reciprocal_condition = llt.rcond();
            RMatrix u = llt.solve(cross.transpose()).transpose();
            if (u.allFinite()) {
                if (report) *report = local;
                return u;
            }
        }
    }
    // Singular or numerically broken: minimum-norm route.
    local.used_pseudo_inverse = true;
    const RMatrix pinv = pseudo_inverse(gram);
    Eigen::JacobiSVD<RMatrix> svd(gram);
    const auto& sv = svd.singularValues();
    local.reciprocal_condition = sv.size() && sv[0] > 0 ? sv[sv.size() - 1] / sv[0] : 0.0;
    if (report) *report = local;
    return cross * pinv;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return std::bit_cast<double>(v);
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw CorruptModelError("model file truncated");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::pair<RMatrix, RVector> init_random(int input_dim, int hidden_dim, Rng& rng) {
    if (input_dim < 1 || hidden_dim < 1)
        throw std::invalid_argument("init_random: dimensions must be >= 1");
    RMatrix w(hidden_dim, input_dim);
    RVector b(hidden_dim);
    // Row-major fill order so the draw sequence does not depend on storage.
    for (int r = 0; r < hidden_dim; ++r)
        for (int c = 0; c < input_dim; ++c) w(r, c) = rng.uniform(-1.0, 1.0);
    for (int r = 0; r < hidden_dim; ++r) b[r] = rng.uniform(-1.0, 1.0);
    return {std::move(w), std::move(b)};
}

void apply_activation(Activation act, RMatrix& z) {
    switch (act) {
    case Activation::Sigmoid:
        z = (1.0 + (-z.array()).exp()).inverse().matrix();
        break;
    case Activation::Tanh:
        z = z.array().tanh().matrix();
        break;
    case Activation::Relu:
        z = z.cwiseMax(0.0);
        break;
    }
}

RMatrix hidden_layer(const ElmModel& model, const RMatrix& inputs) {
    if (inputs.rows() != model.input_dim())
        throw std::invalid_argument("hidden_layer: input rows do not match model input_dim");
    RMatrix z = model.input_weights * inputs;
    z.colwise() += model.bias;
    apply_activation(model.activation, z);
    return z;
}

RMatrix solve_output_weights(const RMatrix& hidden, const RMatrix& targets, double ridge,
                             TrainReport* report) {
    if (hidden.cols() != targets.cols())
        throw std::invalid_argument("solve_output_weights: sample counts differ");
    RMatrix gram = RMatrix::Zero(hidden.rows(), hidden.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(hidden);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return solve_from_gram(std::move(gram), targets * hidden.transpose(), ridge, report);
}

ElmModel train(const TrainingSet& set, int input_dim, int hidden_dim, double ridge, Rng& rng,
               TrainReport* report) {
    const Eigen::Index samples = set.inputs.cols();
    if (samples < 1) throw std::invalid_argument("train: empty training set");
    if (set.labels.cols() != samples)
        throw std::invalid_argument("train: input and label column counts differ");
    if (set.inputs.rows() != input_dim)
        throw std::invalid_argument("train: input rows do not match input_dim");

    ElmModel model;
    std::tie(model.input_weights, model.bias) = init_random(input_dim, hidden_dim, rng);

    // Accumulate H H^T and T H^T over column blocks so the full hidden
    // matrix never has to be materialized.
    RMatrix gram = RMatrix::Zero(hidden_dim, hidden_dim);
    RMatrix cross = RMatrix::Zero(set.labels.rows(), hidden_dim);
    for (Eigen::Index start = 0; start < samples; start += kTrainChunk) {
        const Eigen::Index len = std::min(kTrainChunk, samples - start);
        const RMatrix h = hidden_layer(model, set.inputs.middleCols(start, len));
        gram.selfadjointView<Eigen::Lower>().rankUpdate(h);
        cross.noalias() += set.labels.middleCols(start, len) * h.transpose();
    }
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

    model.output_weights = solve_from_gram(std::move(gram), cross, ridge, report);
    return model;
}

RMatrix one_hot_labels(std::span<const int> offsets, int dim) {
    RMatrix t = RMatrix::Zero(dim, static_cast<Eigen::Index>(offsets.size()));
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (offsets[i] < 0 || offsets[i] >= dim)
            throw std::invalid_argument("one_hot_labels: offset outside label range");
        t(offsets[i], static_cast<Eigen::Index>(i)) = 1.0;
    }
    return t;
}

RVector infer(const ElmModel& model, const RVector& qbar) {
    if (qbar.size() != model.input_dim())
        throw std::invalid_argument("infer: metric length does not match model input_dim");
    RMatrix z = model.input_weights * qbar + model.bias;
    apply_activation(model.activation, z);
    return model.output_weights * z.col(0);
}

int decide_offset(const RVector& output) {
    if (output.size() == 0) throw std::invalid_argument("decide_offset: empty output");
    Eigen::Index best = 0;
    double best_val = output[0] * output[0];
    for (Eigen::Index j = 1; j < output.size(); ++j) {
        const double v = output[j] * output[j];
        if (v > best_val) {
            best_val = v;
            best = j;
        }
    }
    return static_cast<int>(best);
}

std::vector<std::uint8_t> serialize_model(const ElmModel& model) {
    const auto n = static_cast<std::uint32_t>(model.input_dim());
    const auto hidden = static_cast<std::uint32_t>(model.hidden_dim());
    if (model.bias.size() != model.hidden_dim() || model.output_weights.rows() != model.input_dim() ||
        model.output_weights.cols() != model.hidden_dim())
        throw std::invalid_argument("serialize_model: inconsistent model dimensions");

    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.push_back(kFormatVersion);
    out.push_back(static_cast<std::uint8_t>(model.activation));
    put_u32(out, n);
    put_u32(out, hidden);
    out.reserve(out.size() + 8 * (2 * std::size_t{n} * hidden + hidden));
    for (Eigen::Index r = 0; r < model.input_weights.rows(); ++r)
        for (Eigen::Index c = 0; c < model.input_weights.cols(); ++c)
            put_f64(out, model.input_weights(r, c));
    for (Eigen::Index r = 0; r < model.bias.size(); ++r) put_f64(out, model.bias[r]);
    for (Eigen::Index r = 0; r < model.output_weights.rows(); ++r)
        for (Eigen::Index c = 0; c < model.output_weights.cols(); ++c)
            put_f64(out, model.output_weights(r, c));
    return out;
}

ElmModel deserialize_model(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    for (auto m : kMagic)
        if (in.u8() != m) throw CorruptModelError("model file: bad magic");
    if (in.u8() != kFormatVersion) throw CorruptModelError("model file: unsupported version");
    const std::uint8_t act = in.u8();
    if (act > static_cast<std::uint8_t>(Activation::Relu))
        throw CorruptModelError("model file: unknown activation id");
    const std::uint32_t n = in.u32();
    const std::uint32_t hidden = in.u32();
    if (n == 0 || hidden == 0) throw CorruptModelError("model file: zero dimension");
    const std::size_t expected = 8 * (2 * std::size_t{n} * hidden + hidden);
    if (in.remaining() != expected)
        throw CorruptModelError("model file: payload size does not match dimensions");

    ElmModel model;
    model.activation = static_cast<Activation>(act);
    model.input_weights.resize(hidden, n);
    model.bias.resize(hidden);
    model.output_weights.resize(n, hidden);
    for (std::uint32_t r = 0; r < hidden; ++r)
        for (std::uint32_t c = 0; c < n; ++c) model.input_weights(r, c) = in.f64();
    for (std::uint32_t r = 0; r < hidden; ++r) model.bias[r] = in.f64();
    for (std::uint32_t r = 0; r < n; ++r)
        for (std::uint32_t c = 0; c < hidden; ++c) model.output_weights(r, c) = in.f64();
    if (!model.input_weights.allFinite() || !model.bias.allFinite() ||
        !model.output_weights.allFinite())
        throw CorruptModelError("model file: non-finite weights");
    return model;
}

void save_model(const ElmModel& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_model: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("save_model: write failed for " + path.string());
}

ElmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_model: cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

} // namespace elmfs

#include "ebcs/qnetwork.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ebcs {

double huber_loss(double prediction, double target, double delta) {
    const double err = std::abs(prediction - target);
    if (err <= delta) return 0.5 * err * err;
    return delta * (err - 0.5 * delta);
}

double huber_gradient(double prediction, double target, double delta) {
    const double err = prediction - target;
    if (std::abs(err) <= delta) return err;
    return err > 0 ? delta : -delta;
}

QNetwork::QNetwork(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("qnetwork: need at least an input and an output layer");
    for (std::size_t s : sizes_)
        if (s == 0) throw std::invalid_argument("qnetwork: layer sizes must be positive");
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        weight_offset_.push_back(offset);
        offset += sizes_[l + 1] * sizes_[l];
        bias_offset_.push_back(offset);
        offset += sizes_[l + 1];
    }
    params_.assign(offset, 0.0);
}

QNetwork QNetwork::make(std::size_t input_size, std::size_t num_actions, std::size_t hidden_width,
                        std::size_t hidden_layers) {
    std::vector<std::size_t> sizes{input_size};
    sizes.insert(sizes.end(), hidden_layers, hidden_width);
    sizes.push_back(num_actions);
    return QNetwork(std::move(sizes));
}

void QNetwork::initialize(Rng& rng) {
    std::fill(params_.begin(), params_.end(), 0.0);
    for (std::size_t l = 0; l < num_layers(); ++l) {
        const bool output_layer = l + 1 == num_layers();
        const double limit = output_layer ? 0.01 : std::sqrt(6.0 / static_cast<double>(sizes_[l]));
        std::uniform_real_distribution<double> init(-limit, limit);
        auto w = weights(l);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = init(rng);
    }
}

QNetwork::WeightView QNetwork::weights(std::size_t layer) {
    return {params_.data() + weight_offset_.at(layer), static_cast<Eigen::Index>(sizes_[layer + 1]),
            static_cast<Eigen::Index>(sizes_[layer])};
}

QNetwork::ConstWeightView QNetwork::weights(std::size_t layer) const {
    return {params_.data() + weight_offset_.at(layer), static_cast<Eigen::Index>(sizes_[layer + 1]),
            static_cast<Eigen::Index>(sizes_[layer])};
}

QNetwork::BiasView QNetwork::bias(std::size_t layer) {
    return {params_.data() + bias_offset_.at(layer), static_cast<Eigen::Index>(sizes_[layer + 1])};
}

QNetwork::ConstBiasView QNetwork::bias(std::size_t layer) const {
    return {params_.data() + bias_offset_.at(layer), static_cast<Eigen::Index>(sizes_[layer + 1])};
}

Eigen::VectorXd QNetwork::forward(std::span<const double> x) const {
    if (x.size() != input_size())
        throw std::invalid_argument("qnetwork: input has " + std::to_string(x.size()) + " features, expected " +
                                    std::to_string(input_size()));
    Eigen::MatrixXd column = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return forward_batch(column).col(0);
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& inputs) const {
    if (static_cast<std::size_t>(inputs.rows()) != input_size())
        throw std::invalid_argument("qnetwork: batch rows do not match the input size");
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < num_layers(); ++l) {
        Eigen::MatrixXd z = weights(l) * a;
        z.colwise() += bias(l);
        if (l + 1 < num_layers()) z = z.cwiseMax(0.0);
        a = std::move(z);
    }
    return a;
}

double QNetwork::backward(std::span<const double> x, std::size_t action, double target, std::span<double> grad,
                          double huber_delta) const {
    if (x.size() != input_size()) throw std::invalid_argument("qnetwork: input size mismatch in backward");
    Eigen::MatrixXd column = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    const std::size_t actions[] = {action};
    const double targets[] = {target};
    return backward_batch(column, actions, targets, grad, huber_delta);
}

double QNetwork::backward_batch(const Eigen::MatrixXd& inputs, std::span<const std::size_t> actions,
                                std::span<const double> targets, std::span<double> grad, double huber_delta) const {
    const auto batch = static_cast<std::size_t>(inputs.cols());
    if (static_cast<std::size_t>(inputs.rows()) != input_size() || actions.size() != batch ||
        targets.size() != batch)
        throw std::invalid_argument("qnetwork: batch shape mismatch in backward");
    if (grad.size() != parameter_count()) throw std::invalid_argument("qnetwork: gradient buffer has wrong length");
    if (batch == 0) return 0.0;

    // activations[l] is the input to layer l; activations.back() is Q.
    std::vector<Eigen::MatrixXd> activations;
    activations.reserve(num_layers() + 1);
    activations.push_back(inputs);
    for (std::size_t l = 0; l < num_layers(); ++l) {
        Eigen::MatrixXd z = weights(l) * activations.back();
        z.colwise() += bias(l);
        if (l + 1 < num_layers()) z = z.cwiseMax(0.0);
        activations.push_back(std::move(z));
    }

    const double inv_batch = 1.0 / static_cast<double>(batch);
    const Eigen::MatrixXd& q = activations.back();
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        if (actions[b] >= output_size()) throw std::out_of_range("qnetwork: action index out of range");
        const auto a = static_cast<Eigen::Index>(actions[b]);
        const auto col = static_cast<Eigen::Index>(b);
        loss += huber_loss(q(a, col), targets[b], huber_delta);
        delta(a, col) = huber_gradient(q(a, col), targets[b], huber_delta) * inv_batch;
    }

    for (std::size_t l = num_layers(); l-- > 0;) {
        WeightView grad_w{grad.data() + weight_offset_[l], static_cast<Eigen::Index>(sizes_[l + 1]),
                          static_cast<Eigen::Index>(sizes_[l])};
        BiasView grad_b{grad.data() + bias_offset_[l], static_cast<Eigen::Index>(sizes_[l + 1])};
        grad_w.noalias() += delta * activations[l].transpose();
        grad_b += delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd upstream = weights(l).transpose() * delta;
        // ReLU derivative; activations[l] is post-ReLU, zero exactly where inactive.
        delta = upstream.cwiseProduct((activations[l].array() > 0.0).cast<double>().matrix());
    }
    return loss * inv_batch;
}

std::size_t argmax_lowest(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmax: empty vector");
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[best]) best = k;
    return best;
}

void save_model(std::ostream& out, const TrainedModel& model) {
    const QNetwork& net = model.network;
    out << "ebcs-qnetwork 1\n";
    out << "sizes";
    for (std::size_t s : net.layer_sizes()) out << ' ' << s;
    out << '\n';
    out << "frames_per_step " << model.encoder.frames_per_step() << '\n';
    out << "num_bss " << model.encoder.num_bss() << '\n';
    out << "rss_range_dbm " << format_double(model.encoder.normalization().min_dbm) << ' '
        << format_double(model.encoder.normalization().max_dbm) << '\n';
    out << "bandwidth_hz " << format_double(model.bandwidth_hz) << '\n';
    out << "rates " << model.rates.size();
    for (double r : model.rates.rates()) out << ' ' << format_double(r);
    out << '\n';
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const auto w = net.weights(l);
        out << "layer " << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) out << (c ? " " : "") << format_double(w(r, c));
            out << '\n';
        }
        const auto b = net.bias(l);
        out << "bias " << l << ' ' << b.size() << '\n';
        for (Eigen::Index r = 0; r < b.size(); ++r) out << (r ? " " : "") << format_double(b(r));
        out << '\n';
    }
    out << "end\n";
}

namespace {

class Tokens {
public:
    explicit Tokens(std::istream& in) : in_(in) {}

    std::string word() {
        std::string tok;
        if (!(in_ >> tok)) throw std::runtime_error("weights: unexpected end of file");
        return tok;
    }
    void expect(const std::string& keyword) {
        const std::string tok = word();
        if (tok != keyword) throw std::runtime_error("weights: expected '" + keyword + "', found '" + tok + "'");
    }
    std::size_t count() {
        const std::string tok = word();
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size() || tok.empty() || tok.front() == '-')
            throw std::runtime_error("weights: bad count '" + tok + "'");
        return static_cast<std::size_t>(v);
    }
    double number() {
        const std::string tok = word();
        double v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw std::runtime_error("weights: bad number '" + tok + "'");
        return v;
    }

private:
    std::istream& in_;
};

}  // namespace

TrainedModel load_model(std::istream& in) {
    Tokens tok(in);
    tok.expect("ebcs-qnetwork");
    if (tok.count() != 1) throw std::runtime_error("weights: unsupported format version");

    tok.expect("sizes");
    std::vector<std::size_t> sizes;
    std::string word;
    // sizes run until the next keyword
    for (;;) {
        word = tok.word();
        if (word == "frames_per_step") break;
        sizes.push_back(static_cast<std::size_t>(std::stoull(word)));
    }
    const std::size_t frames = tok.count();
    tok.expect("num_bss");
    const std::size_t num_bss = tok.count();
    tok.expect("rss_range_dbm");
    RssNormalization norm;
    norm.min_dbm = tok.number();
    norm.max_dbm = tok.number();
    tok.expect("bandwidth_hz");
    const double bandwidth = tok.number();
    tok.expect("rates");
    std::vector<double> rates(tok.count());
    for (double& r : rates) r = tok.number();

    TrainedModel model{QNetwork(sizes), StateEncoder(frames, num_bss, norm), RateTable(rates, bandwidth), bandwidth};
    if (model.network.input_size() != model.encoder.dimension())
        throw std::runtime_error("weights: network input size does not match the state encoding");
    if (model.network.output_size() != model.rates.size())
        throw std::runtime_error("weights: network output size does not match the rate table");

    for (std::size_t l = 0; l < model.network.num_layers(); ++l) {
        tok.expect("layer");
        auto w = model.network.weights(l);
        if (tok.count() != l || tok.count() != static_cast<std::size_t>(w.rows()) ||
            tok.count() != static_cast<std::size_t>(w.cols()))
            throw std::runtime_error("weights: layer " + std::to_string(l) + " header mismatch");
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = tok.number();
        tok.expect("bias");
        auto b = model.network.bias(l);
        if (tok.count() != l || tok.count() != static_cast<std::size_t>(b.size()))
            throw std::runtime_error("weights: bias " + std::to_string(l) + " header mismatch");
        for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = tok.number();
    }
    tok.expect("end");
    for (double p : model.network.parameters())
        if (!std::isfinite(p)) throw std::runtime_error("weights: non-finite parameter");
    return model;
}

void save_model_file(const std::string& path, const TrainedModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    save_model(out, model);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

TrainedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open weights file '" + path + "'");
    return load_model(in);
}

}  // namespace ebcs

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ebcs/channel.hpp"
#include "ebcs/env.hpp"
#include "ebcs/scenario.hpp"

namespace ebcs {

inline constexpr std::size_t kDefaultHiddenWidth = 64;
inline constexpr std::size_t kDefaultHiddenLayers = 5;  // six weight layers in total

double huber_loss(double prediction, double target, double delta = 1.0);
// d/dprediction of huber_loss.
double huber_gradient(double prediction, double target, double delta = 1.0);

// Fully connected ReLU network with a linear output head, one output per
// rate. All parameters live in a single flat buffer, layer by layer: the
// row-major weight matrix (out x in) followed by the bias vector (out).
class QNetwork {
public:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using WeightView = Eigen::Map<RowMatrix>;
    using ConstWeightView = Eigen::Map<const RowMatrix>;
    using BiasView = Eigen::Map<Eigen::VectorXd>;
    using ConstBiasView = Eigen::Map<const Eigen::VectorXd>;

    // layer_sizes = {input, hidden..., output}; parameters start at zero.
    explicit QNetwork(std::vector<std::size_t> layer_sizes);

    static QNetwork make(std::size_t input_size, std::size_t num_actions,
                         std::size_t hidden_width = kDefaultHiddenWidth,
                         std::size_t hidden_layers = kDefaultHiddenLayers);

    // He-uniform hidden weights, U(-0.01, 0.01) output weights, zero biases.
    void initialize(Rng& rng);

    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t num_layers() const { return sizes_.size() - 1; }
    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }

    std::size_t parameter_count() const { return params_.size(); }
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    WeightView weights(std::size_t layer);
    ConstWeightView weights(std::size_t layer) const;
    BiasView bias(std::size_t layer);
    ConstBiasView bias(std::size_t layer) const;

    Eigen::VectorXd forward(std::span<const double> x) const;
    // inputs: one column per sample; returns one column of Q-values per sample.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

    // Accumulates the gradient of huber(Q(x)[action], target) into `grad`
    // (length parameter_count()) and returns the loss.
    double backward(std::span<const double> x, std::size_t action, double target, std::span<double> grad,
                    double huber_delta = 1.0) const;

    // Mean Huber loss over the batch; `grad` receives the mean gradient.
    double backward_batch(const Eigen::MatrixXd& inputs, std::span<const std::size_t> actions,
                          std::span<const double> targets, std::span<double> grad,
                          double huber_delta = 1.0) const;

    friend bool operator==(const QNetwork&, const QNetwork&) = default;

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> weight_offset_;
    std::vector<std::size_t> bias_offset_;
    std::vector<double> params_;
};

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);
inline std::size_t argmax_lowest(const Eigen::VectorXd& values) {
    return argmax_lowest(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

// Everything needed to act without the training configuration.
struct TrainedModel {
    QNetwork network;
    StateEncoder encoder;
    RateTable rates;
    double bandwidth_hz = 20e6;
};

// Text layout, whitespace separated, numbers in shortest round-trip form:
//
//   ebcs-qnetwork 1
//   sizes <n0> <n1> ... <nL>
//   frames_per_step <m>
//   num_bss <I>
//   rss_range_dbm <min> <max>
//   bandwidth_hz <W>
//   rates <K> <r1> ... <rK>
//   layer <l> <rows> <cols>
//   <rows lines of cols weights>      (row-major)
//   bias <l> <rows>
//   <one line of rows values>
//   ... repeated for every layer ...
//   end
void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);

void save_model_file(const std::string& path, const TrainedModel& model);
TrainedModel load_model_file(const std::string& path);

}  // namespace ebcs

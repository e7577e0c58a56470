#ifndef FLOWRL_MLP_HPP_
#define FLOWRL_MLP_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace flowrl {

double relu(double x);

// Fully connected network, ReLU on hidden layers and a linear output.
// Parameters live in one flat vector: for each layer, the row-major
// (out x in) weight matrix followed by the bias vector.
class Mlp {
 public:
  Mlp() = default;
  // All parameters zero.
  explicit Mlp(std::vector<int> layer_sizes);
  // Parameters uniform in [-scale, scale].
  static Mlp random(std::vector<int> layer_sizes, double scale,
                    std::mt19937_64& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  std::size_t num_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Weight (row `out`, column `in`) and bias of weight layer `l`.
  double& weight(int l, int out, int in);
  double weight(int l, int out, int in) const;
  double& bias(int l, int out);
  double bias(int l, int out) const;

  bool operator==(const Mlp&) const = default;

 private:
  std::size_t weight_offset(int l) const { return offsets_[l]; }
  std::size_t bias_offset(int l) const {
    return offsets_[l] + static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
  }

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Throws NonFiniteInput.
std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input);

// Gradient of (target - Q_action(input))^2 w.r.t. every parameter, laid out
// like Mlp::params().
std::vector<double> loss_gradient(const Mlp& net,
                                  const std::vector<double>& input, int action,
                                  double target);

void sgd_step(Mlp& net, const std::vector<double>& input, int action,
              double target, double lr);

// Header line with the layer sizes, then one parameter per line.
void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(std::istream& in);

}  // namespace flowrl

#endif  // FLOWRL_MLP_HPP_

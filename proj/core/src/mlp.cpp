#include "flowrl/mlp.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "flowrl/error.hpp"
#include "flowrl/textio.hpp"

namespace flowrl {

namespace {

[[noreturn]] void bad_net(const std::string& why) {
  throw Error(ErrorCode::kParseError, why, "agent-dqn");
}

// Pre-activations of every weight layer for one input.
std::vector<std::vector<double>> forward_pass(const Mlp& net,
                                              const std::vector<double>& input) {
  if (static_cast<int>(input.size()) != net.input_size()) {
    throw Error(ErrorCode::kValidationError,
                "input has " + std::to_string(input.size()) + " values, net "
                "expects " + std::to_string(net.input_size()),
                "agent-dqn");
  }
  for (double x : input) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFiniteInput, "input contains a non-finite value");
    }
  }
  std::vector<std::vector<double>> z(net.num_layers());
  std::vector<double> act = input;
  for (int l = 0; l < net.num_layers(); ++l) {
    int n_in = net.layer_sizes()[l];
    int n_out = net.layer_sizes()[l + 1];
    z[l].assign(n_out, 0.0);
    for (int o = 0; o < n_out; ++o) {
      double sum = net.bias(l, o);
      for (int i = 0; i < n_in; ++i) sum += net.weight(l, o, i) * act[i];
      z[l][o] = sum;
    }
    act = z[l];
    if (l + 1 < net.num_layers()) {
      for (double& v : act) v = relu(v);
    }
  }
  return z;
}

}  // namespace

double relu(double x) { return x < 0.0 ? 0.0 : x; }

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(sizes_.size()); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::random(std::vector<int> layer_sizes, double scale,
                std::mt19937_64& rng) {
  Mlp net(std::move(layer_sizes));
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& p : net.params_) p = u(rng);
  return net;
}

double& Mlp::weight(int l, int out, int in) {
  return params_[weight_offset(l) + static_cast<std::size_t>(out) * sizes_[l] + in];
}

double Mlp::weight(int l, int out, int in) const {
  return params_[weight_offset(l) + static_cast<std::size_t>(out) * sizes_[l] + in];
}

double& Mlp::bias(int l, int out) { return params_[bias_offset(l) + out]; }

double Mlp::bias(int l, int out) const { return params_[bias_offset(l) + out]; }

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input) {
  return forward_pass(net, input).back();
}

std::vector<double> loss_gradient(const Mlp& net,
                                  const std::vector<double>& input, int action,
                                  double target) {
  auto z = forward_pass(net, input);
  int layers = net.num_layers();
  Mlp grad(net.layer_sizes());  // same layout as the parameters

  // dL/dz at the output: only the selected head carries error.
  std::vector<double> delta(net.output_size(), 0.0);
  delta[action] = -2.0 * (target - z.back()[action]);

  for (int l = layers - 1; l >= 0; --l) {
    int n_in = net.layer_sizes()[l];
    int n_out = net.layer_sizes()[l + 1];
    std::vector<double> a_in(n_in);
    for (int i = 0; i < n_in; ++i) {
      a_in[i] = l == 0 ? input[i] : relu(z[l - 1][i]);
    }
    for (int o = 0; o < n_out; ++o) {
      if (delta[o] == 0.0) continue;
      for (int i = 0; i < n_in; ++i) {
        grad.weight(l, o, i) = delta[o] * a_in[i];
      }
      grad.bias(l, o) = delta[o];
    }
    if (l == 0) break;
    std::vector<double> prev(n_in, 0.0);
    for (int i = 0; i < n_in; ++i) {
      if (z[l - 1][i] <= 0.0) continue;  // ReLU derivative
      double sum = 0.0;
      for (int o = 0; o < n_out; ++o) sum += net.weight(l, o, i) * delta[o];
      prev[i] = sum;
    }
    delta = std::move(prev);
  }
  return grad.params();
}

void sgd_step(Mlp& net, const std::vector<double>& input, int action,
              double target, double lr) {
  auto grad = loss_gradient(net, input, action, target);
  auto& p = net.params();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * grad[i];
}

void write_mlp(std::ostream& out, const Mlp& net) {
  out << "layers";
  for (int s : net.layer_sizes()) out << ' ' << s;
  out << '\n';
  for (double p : net.params()) out << format_exact(p) << '\n';
}

Mlp read_mlp(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad_net("empty network file");
  auto head = split(trim(line), ' ');
  if (head.size() < 3 || head[0] != "layers") bad_net("missing layers header");
  std::vector<int> sizes;
  for (std::size_t i = 1; i < head.size(); ++i) {
    std::int64_t v = 0;
    if (!parse_int(head[i], &v) || v <= 0) bad_net("bad layer size");
    sizes.push_back(static_cast<int>(v));
  }
  Mlp net(sizes);
  std::size_t k = 0;
  while (std::getline(in, line)) {
    auto body = trim(line);
    if (body.empty()) continue;
    if (k >= net.num_params()) bad_net("too many parameters");
    if (!parse_double(body, &net.params()[k])) {
      bad_net("bad parameter " + std::to_string(k));
    }
    ++k;
  }
  if (k != net.num_params()) bad_net("too few parameters");
  return net;
}

}  // namespace flowrl

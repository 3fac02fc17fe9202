#include "pedcross/mlp.hpp"

#include <cmath>

#include "pedcross/errors.hpp"
#include "pedcross/rng.hpp"

namespace pedcross {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Activations for every layer, pre-activation for hidden layers kept
// implicitly via (a > 0) on the ReLU outputs.
struct ForwardState {
    std::vector<std::vector<double>> activations;  // [layer][row * width]
};

ForwardState forward_all(const MlpParams& net, const Matrix& X, Task task) {
    const std::size_t n = X.rows();
    ForwardState st;
    st.activations.resize(net.layers.size() + 1);
    st.activations[0].assign(X.data().begin(), X.data().end());

    std::size_t width_in = X.cols();
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const MlpLayer& layer = net.layers[l];
        if (layer.in != width_in) throw ShapeError("mlp: layer input width mismatch");
        const bool last = l + 1 == net.layers.size();
        std::vector<double>& out = st.activations[l + 1];
        out.assign(n * layer.out, 0.0);
        const std::vector<double>& in = st.activations[l];
        for (std::size_t i = 0; i < n; ++i) {
            const double* a = in.data() + i * layer.in;
            double* o = out.data() + i * layer.out;
            for (std::size_t u = 0; u < layer.out; ++u) {
                const double* w = layer.w.data() + u * layer.in;
                double z = layer.b[u];
                for (std::size_t v = 0; v < layer.in; ++v) z += w[v] * a[v];
                if (last) {
                    o[u] = task == Task::classify ? sigmoid(z) : z;
                } else {
                    o[u] = z > 0.0 ? z : 0.0;  // ReLU
                }
            }
        }
        width_in = layer.out;
    }
    return st;
}

}  // namespace

MlpParams mlp_init(std::size_t inputs, const std::vector<int>& hidden, std::uint64_t seed) {
    for (int h : hidden) {
        if (h < 1) throw ConfigError("mlp hidden sizes must all be >= 1");
    }
    std::vector<std::size_t> sizes;
    sizes.push_back(inputs);
    for (int h : hidden) sizes.push_back(static_cast<std::size_t>(h));
    sizes.push_back(1);

    Rng rng(seed);
    MlpParams net;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        MlpLayer layer;
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        layer.w.resize(layer.in * layer.out);
        layer.b.assign(layer.out, 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        for (double& w : layer.w) w = (rng.uniform01() * 2.0 - 1.0) * limit;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::vector<double> mlp_forward(const MlpParams& net, const Matrix& X, Task task) {
    ForwardState st = forward_all(net, X, task);
    return st.activations.back();
}

double mlp_loss(const MlpParams& net, const Matrix& X, const std::vector<double>& y, Task task) {
    if (X.rows() != y.size()) throw ShapeError("mlp_loss: row/target count mismatch");
    const std::vector<double> pred = mlp_forward(net, X, task);
    const double n = static_cast<double>(y.size());
    double loss = 0.0;
    if (task == Task::classify) {
        constexpr double eps = 1e-12;  // clamp keeps log finite at saturation
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double p = std::min(std::max(pred[i], eps), 1.0 - eps);
            loss += -(y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p));
        }
    } else {
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double r = pred[i] - y[i];
            loss += 0.5 * r * r;
        }
    }
    return loss / n;
}

MlpParams mlp_gradient(const MlpParams& net, const Matrix& X, const std::vector<double>& y,
                       Task task) {
    if (X.rows() != y.size()) throw ShapeError("mlp_gradient: row/target count mismatch");
    const std::size_t n = X.rows();
    ForwardState st = forward_all(net, X, task);

    MlpParams grad;
    grad.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        grad.layers[l].in = net.layers[l].in;
        grad.layers[l].out = net.layers[l].out;
        grad.layers[l].w.assign(net.layers[l].w.size(), 0.0);
        grad.layers[l].b.assign(net.layers[l].b.size(), 0.0);
    }

    // With sigmoid+BCE and with linear+0.5*SE the output delta is identical:
    // (prediction - target) / n.
    const std::vector<double>& out = st.activations.back();
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = (out[i] - y[i]) / static_cast<double>(n);

    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const MlpLayer& layer = net.layers[l];
        MlpLayer& g = grad.layers[l];
        const std::vector<double>& a_in = st.activations[l];

        std::vector<double> delta_prev;
        if (l > 0) delta_prev.assign(n * layer.in, 0.0);

        for (std::size_t i = 0; i < n; ++i) {
            const double* a = a_in.data() + i * layer.in;
            const double* d = delta.data() + i * layer.out;
            for (std::size_t u = 0; u < layer.out; ++u) {
                g.b[u] += d[u];
                double* gw = g.w.data() + u * layer.in;
                const double* w = layer.w.data() + u * layer.in;
                if (l > 0) {
                    double* dp = delta_prev.data() + i * layer.in;
                    for (std::size_t v = 0; v < layer.in; ++v) {
                        gw[v] += d[u] * a[v];
                        dp[v] += d[u] * w[v];
                    }
                } else {
                    for (std::size_t v = 0; v < layer.in; ++v) gw[v] += d[u] * a[v];
                }
            }
        }

        if (l > 0) {
            // ReLU derivative from the stored activations (a > 0 iff z > 0).
            for (std::size_t i = 0; i < n; ++i) {
                const double* a = a_in.data() + i * layer.in;
                double* dp = delta_prev.data() + i * layer.in;
                for (std::size_t v = 0; v < layer.in; ++v) {
                    if (a[v] <= 0.0) dp[v] = 0.0;
                }
            }
            delta = std::move(delta_prev);
        }
    }
    return grad;
}

std::vector<double> mlp_flatten(const MlpParams& net) {
    std::vector<double> theta;
    for (const MlpLayer& l : net.layers) {
        theta.insert(theta.end(), l.w.begin(), l.w.end());
        theta.insert(theta.end(), l.b.begin(), l.b.end());
    }
    return theta;
}

void mlp_unflatten(MlpParams& net, const std::vector<double>& theta) {
    std::size_t k = 0;
    for (MlpLayer& l : net.layers) {
        for (double& w : l.w) w = theta[k++];
        for (double& b : l.b) b = theta[k++];
    }
    if (k != theta.size()) throw ShapeError("mlp_unflatten: parameter count mismatch");
}

MlpTrainResult mlp_train(const Matrix& X, const std::vector<double>& y, Task task,
                         const MlpTrainConfig& config) {
    if (X.rows() == 0) throw TrainingError("mlp_train: no training rows");
    if (X.rows() != y.size()) throw ShapeError("mlp_train: row/target count mismatch");
    if (!(config.learning_rate > 0.0)) throw ConfigError("mlp learning rate must be > 0");
    if (config.epochs < 0) throw ConfigError("mlp epochs must be >= 0");

    MlpTrainResult result;
    result.net = mlp_init(X.cols(), config.hidden, config.seed);

    std::vector<double> theta = mlp_flatten(result.net);
    std::vector<double> m(theta.size(), 0.0);
    std::vector<double> v(theta.size(), 0.0);
    constexpr double eps = 1e-8;

    double loss = mlp_loss(result.net, X, y, task);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const MlpParams grad = mlp_gradient(result.net, X, y, task);
        const std::vector<double> g = mlp_flatten(grad);

        const double bc1 = 1.0 - std::pow(config.beta1, epoch);
        const double bc2 = 1.0 - std::pow(config.beta2, epoch);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
            v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
            theta[k] -= config.learning_rate * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps);
        }
        mlp_unflatten(result.net, theta);
        result.epochs_run = epoch;

        loss = mlp_loss(result.net, X, y, task);
        if (!std::isfinite(loss)) {
            throw TrainingError("mlp training diverged: non-finite loss at epoch " +
                                std::to_string(epoch));
        }
    }
    result.final_loss = loss;
    return result;
}

}  // namespace pedcross

#include "geocmd/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace geocmd {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_dimension(const FeatureVector& x, std::uint32_t dimension) {
    if (x.dimension != dimension)
        throw ModelError(ModelErrorKind::DimensionMismatch,
                         "feature vector has dimension " + std::to_string(x.dimension) +
                             ", model expects " + std::to_string(dimension));
    if (!x.entries.empty() && x.entries.back().index >= dimension)
        throw ModelError(ModelErrorKind::DimensionMismatch, "feature index out of range");
}

// CG on H d = -g, stopped when |r| <= eta |g|.
std::vector<double> newton_direction(const SquaredHingeObjective& f, std::span<const double> theta,
                                     std::span<const double> grad) {
    constexpr double kEta = 0.1;
    constexpr int kMaxCg = 200;
    const std::size_t n = grad.size();
    std::vector<double> d(n, 0.0);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = -grad[i];
    std::vector<double> p = r;
    double rr = dot(r, r);
    const double stop = kEta * kEta * dot(grad, grad);
    for (int it = 0; it < kMaxCg && rr > stop; ++it) {
        const std::vector<double> hp = f.hessian_times(theta, p);
        const double php = dot(p, hp);
        if (php <= 0.0) break;
        const double alpha = rr / php;
        for (std::size_t i = 0; i < n; ++i) {
            d[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; }))
        for (std::size_t i = 0; i < n; ++i) d[i] = -grad[i];
    return d;
}

} // namespace

SquaredHingeObjective::SquaredHingeObjective(std::span<const FeatureVector> x, std::span<const int> y,
                                             std::uint32_t dimension, double C)
    : x_(x), y_(y), dimension_(dimension), C_(C) {
    if (x.size() != y.size())
        throw ModelError(ModelErrorKind::InvalidArgument, "sample and label counts differ");
    for (const auto& xi : x) check_dimension(xi, dimension);
}

double SquaredHingeObjective::decision(std::span<const double> theta, std::size_t i) const {
    double z = theta[dimension_];
    for (const auto& e : x_[i].entries) z += e.weight * theta[e.index];
    return z;
}

double SquaredHingeObjective::value(std::span<const double> theta) const {
    double reg = 0.0;
    for (std::uint32_t j = 0; j < dimension_; ++j) reg += theta[j] * theta[j];
    double loss = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double m = 1.0 - y_[i] * decision(theta, i);
        if (m > 0.0) loss += m * m;
    }
    return 0.5 * reg + C_ * loss;
}

std::vector<double> SquaredHingeObjective::gradient(std::span<const double> theta) const {
    std::vector<double> g(theta.begin(), theta.end());
    g[dimension_] = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double m = 1.0 - y_[i] * decision(theta, i);
        if (m <= 0.0) continue;
        const double coef = -2.0 * C_ * y_[i] * m;
        for (const auto& e : x_[i].entries) g[e.index] += coef * e.weight;
        g[dimension_] += coef;
    }
    return g;
}

std::vector<double> SquaredHingeObjective::hessian_times(std::span<const double> theta,
                                                         std::span<const double> v) const {
    std::vector<double> out(v.begin(), v.end());
    out[dimension_] = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (1.0 - y_[i] * decision(theta, i) <= 0.0) continue;
        double xv = v[dimension_];
        for (const auto& e : x_[i].entries) xv += e.weight * v[e.index];
        const double coef = 2.0 * C_ * xv;
        for (const auto& e : x_[i].entries) out[e.index] += coef * e.weight;
        out[dimension_] += coef;
    }
    return out;
}

BinarySvmFit fit_binary_svm(std::span<const FeatureVector> x, std::span<const int> y, std::uint32_t dimension,
                            const SvmOptions& options) {
    if (options.C <= 0.0) throw ModelError(ModelErrorKind::InvalidArgument, "C must be positive");
    const SquaredHingeObjective f(x, y, dimension, options.C);
    std::vector<double> theta(f.parameter_count(), 0.0);

    BinarySvmFit fit;
    double current = f.value(theta);
    fit.objective_history.push_back(current);

    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 40;
    std::vector<double> trial(theta.size());
    for (std::uint32_t epoch = 0; epoch < options.max_iter; ++epoch) {
        const std::vector<double> g = f.gradient(theta);
        if (std::sqrt(dot(g, g)) <= 1e-12) break;
        const std::vector<double> d = newton_direction(f, theta, g);
        const double slope = dot(g, d);

        double step = 1.0;
        double next = current;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
            for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] + step * d[i];
            next = f.value(trial);
            if (next <= current + kArmijo * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        theta.swap(trial);
        fit.objective_history.push_back(next);
        fit.epochs = epoch + 1;
        const double change = std::abs(current - next) / std::max(std::abs(current), 1e-300);
        current = next;
        if (change < options.tol) break;
    }

    fit.bias = theta[dimension];
    theta.pop_back();
    fit.weights = std::move(theta);
    return fit;
}

std::vector<std::string> class_labels(const std::vector<Sample>& train) {
    std::set<std::string> labels;
    for (const Sample& s : train) labels.insert(s.function);
    if (labels.size() < 2)
        throw ModelError(ModelErrorKind::SingleClassTraining,
                         "training data must contain at least two classes, found " +
                             std::to_string(labels.size()));
    return {labels.begin(), labels.end()};
}

std::vector<double> SvmModel::decision_values(const FeatureVector& x) const {
    check_dimension(x, vocabulary.size());
    std::vector<double> out(classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) out[k] = x.dot(weights[k]) + bias[k];
    return out;
}

std::size_t SvmModel::predict_index(const FeatureVector& x) const {
    const std::vector<double> scores = decision_values(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] > scores[best]) best = k;
    return best;
}

SvmModel train_svm(const std::vector<Sample>& train, const SvmOptions& options, SvmTrainingTrace* trace) {
    SvmModel model;
    model.classes = class_labels(train);
    model.vocabulary = fit_vocabulary(train);
    model.options = options;

    std::vector<FeatureVector> x;
    x.reserve(train.size());
    for (const Sample& s : train) x.push_back(model.vocabulary.featurize(s.query));

    if (trace) trace->objective_history.clear();
    std::vector<int> y(train.size());
    for (const std::string& label : model.classes) {
        for (std::size_t i = 0; i < train.size(); ++i) y[i] = train[i].function == label ? 1 : -1;
        BinarySvmFit fit = fit_binary_svm(x, y, model.vocabulary.size(), options);
        model.weights.push_back(std::move(fit.weights));
        model.bias.push_back(fit.bias);
        if (trace) trace->objective_history.push_back(std::move(fit.objective_history));
    }
    return model;
}

} // namespace geocmd

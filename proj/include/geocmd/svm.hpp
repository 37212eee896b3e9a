#pragma once

// One-vs-rest linear SVM, squared hinge loss, L2 penalty on w only:
//
//   min_{w,b}  1/2 |w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))^2
//
// solved per class in the primal with a truncated Newton method (conjugate
// gradient on the generalized Hessian) and Armijo backtracking, so the
// recorded objective never increases between epochs.

#include "geocmd/dataset.hpp"
#include "geocmd/features.hpp"
#include "geocmd/model_error.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace geocmd {

struct SvmOptions {
    double C = 1.0;
    double tol = 1e-4;
    std::uint32_t max_iter = 1000;
    // The Newton solver is deterministic; the seed is recorded in the model
    // file only so every trainer takes the same arguments.
    std::uint64_t seed = 1;
};

// Binary squared-hinge objective over parameters theta = [w_0 .. w_{d-1}, b].
class SquaredHingeObjective {
public:
    SquaredHingeObjective(std::span<const FeatureVector> x, std::span<const int> y, std::uint32_t dimension,
                          double C);

    std::size_t parameter_count() const noexcept { return dimension_ + 1; }

    double value(std::span<const double> theta) const;
    // Gradient; exact wherever no sample sits on the hinge (margin == 1).
    std::vector<double> gradient(std::span<const double> theta) const;
    // Generalized Hessian-vector product at theta.
    std::vector<double> hessian_times(std::span<const double> theta, std::span<const double> v) const;

private:
    double decision(std::span<const double> theta, std::size_t i) const;

    std::span<const FeatureVector> x_;
    std::span<const int> y_;
    std::uint32_t dimension_;
    double C_;
};

struct BinarySvmFit {
    std::vector<double> weights;
    double bias = 0.0;
    // Objective at the starting point followed by one value per epoch.
    std::vector<double> objective_history;
    std::uint32_t epochs = 0;
};

BinarySvmFit fit_binary_svm(std::span<const FeatureVector> x, std::span<const int> y, std::uint32_t dimension,
                            const SvmOptions& options);

struct SvmModel {
    std::vector<std::string> classes;
    Vocabulary vocabulary;
    std::vector<std::vector<double>> weights; // one row per class, vocabulary-sized
    std::vector<double> bias;
    SvmOptions options;

    std::vector<double> decision_values(const FeatureVector& x) const;
    // argmax of decision values; ties go to the earliest class.
    std::size_t predict_index(const FeatureVector& x) const;
    const std::string& predict(const FeatureVector& x) const { return classes[predict_index(x)]; }
    const std::string& predict_query(std::string_view query) const {
        return predict(vocabulary.featurize(query));
    }
};

// Per-class objective traces from the last train_svm call, in class order.
struct SvmTrainingTrace {
    std::vector<std::vector<double>> objective_history;
};

SvmModel train_svm(const std::vector<Sample>& train, const SvmOptions& options = {},
                   SvmTrainingTrace* trace = nullptr);

// Sorted unique labels; throws SingleClassTraining for fewer than two.
std::vector<std::string> class_labels(const std::vector<Sample>& train);

} // namespace geocmd

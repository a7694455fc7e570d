#include "marlin/forecast/predictor.hpp"

#include <stdexcept>

namespace marlin {

EwmaPredictor::EwmaPredictor(double alpha, int window)
    : alpha_(alpha), window_(window) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("EWMA alpha must be in (0, 1]");
    if (window < 1) throw std::invalid_argument("EWMA window must be >= 1");
}

double EwmaPredictor::predict() const {
    if (history_.empty()) return 0.0;
    double weight = alpha_;
    double num = 0.0;
    double den = 0.0;
    for (double v : history_) {
        num += weight * v;
        den += weight;
        weight *= (1.0 - alpha_);
    }
    return num / den;
}

void EwmaPredictor::update(double observed) {
    history_.push_front(observed);
    if (static_cast<int>(history_.size()) > window_) history_.pop_back();
}

ForecastBank::ForecastBank(int num_models, int num_regions, double alpha, int window)
    : num_models_(num_models), num_regions_(num_regions) {
    predictors_.assign(static_cast<std::size_t>(num_models) * num_regions,
                       EwmaPredictor(alpha, window));
}

std::vector<double> ForecastBank::predict_all() const {
    std::vector<double> out;
    out.reserve(predictors_.size());
    for (const auto& p : predictors_) out.push_back(p.predict());
    return out;
}

void ForecastBank::update_all(const std::vector<double>& observed) {
    if (observed.size() != predictors_.size())
        throw std::invalid_argument("observed series count mismatch");
    for (std::size_t i = 0; i < predictors_.size(); ++i)
        predictors_[i].update(observed[i]);
}

}  // namespace marlin

#pragma once

#include <deque>
#include <vector>

namespace marlin {

// Exponentially weighted moving-average forecaster for one request-volume
// series. Weights fall off by (1 - alpha) per epoch into the past and are
// renormalized over the window, so the forecast is always a convex
// combination of the stored history.
class EwmaPredictor {
  public:
    explicit EwmaPredictor(double alpha = 0.3, int window = 8);

    double alpha() const { return alpha_; }
    int window() const { return window_; }
    bool cold() const { return history_.empty(); }

    // Forecast for the next epoch; 0 on a cold start (no history yet).
    double predict() const;

    // Push an observed volume, evicting beyond the window.
    void update(double observed);

    const std::deque<double>& history() const { return history_; }

  private:
    double alpha_;
    int window_;
    std::deque<double> history_;  // most recent first
};

// One predictor per (model_class, origin_region) series, row-major layout.
class ForecastBank {
  public:
    ForecastBank(int num_models, int num_regions, double alpha = 0.3,
                 int window = 8);

    EwmaPredictor& series(int model, int region) {
        return predictors_[static_cast<std::size_t>(model) * num_regions_ + region];
    }
    const EwmaPredictor& series(int model, int region) const {
        return predictors_[static_cast<std::size_t>(model) * num_regions_ + region];
    }

    // Forecast for every series, row-major (model-major) order.
    std::vector<double> predict_all() const;

    // Record the observed volume of each series for one epoch; entries not
    // present in the workload count as zero.
    void update_all(const std::vector<double>& observed);

    int num_models() const { return num_models_; }
    int num_regions() const { return num_regions_; }

  private:
    int num_models_;
    int num_regions_;
    std::vector<EwmaPredictor> predictors_;
};

}  // namespace marlin

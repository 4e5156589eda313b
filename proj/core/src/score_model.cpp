#include "hexwar/score_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hexwar {

double ScorePredictor::predict(const GlobalAbstraction& g) const {
  return offset + scale * net.forward(g.values)(0);
}

nlohmann::json to_json(const ScoreTrainConfig& c) {
  return {{"behavior", c.behavior},     {"adversary", c.adversary}, {"grid", c.grid},
          {"hidden", c.hidden},         {"lr", c.lr},               {"optimizer", c.optimizer},
          {"batch_size", c.batch_size}, {"epochs", c.epochs},       {"holdout", c.holdout},
          {"seed", c.seed},             {"min_episodes", c.min_episodes}};
}

ScoreTrainConfig score_train_config_from_json(const nlohmann::json& j) {
  ScoreTrainConfig c;
  c.behavior = j.value("behavior", c.behavior);
  c.adversary = j.value("adversary", c.adversary);
  c.grid = j.value("grid", c.grid);
  c.hidden = j.value("hidden", c.hidden);
  c.lr = j.value("lr", c.lr);
  c.optimizer = j.value("optimizer", c.optimizer);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.holdout = j.value("holdout", c.holdout);
  c.seed = j.value("seed", c.seed);
  c.min_episodes = j.value("min_episodes", c.min_episodes);
  return c;
}

std::vector<ScoreSample> score_samples(const Scenario& sc, std::span<const EpisodeLog> logs,
                                       int grid) {
  std::vector<ScoreSample> out;
  for (std::size_t e = 0; e < logs.size(); ++e) {
    const double target = logs[e].final_score;
    replay(sc, logs[e], [&](const GameState& s, const StepRecord&) {
      out.push_back({encode_global(s, grid).values, target, e});
    });
  }
  return out;
}

namespace {

Eigen::MatrixXd gather(const std::vector<ScoreSample>& samples,
                       std::span<const std::size_t> idx, int rows) {
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& f = samples[idx[k]].features;
    m.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  }
  return m;
}

double mse(const ScorePredictor& p, const std::vector<ScoreSample>& samples,
           std::span<const std::size_t> idx) {
  if (idx.empty()) return 0.0;
  const Eigen::MatrixXd x = gather(samples, idx, p.net.input_size());
  const Eigen::MatrixXd y = p.net.forward_batch(x);
  double total = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double err = p.offset + p.scale * y(0, static_cast<Eigen::Index>(k)) - samples[idx[k]].target;
    total += err * err;
  }
  return total / static_cast<double>(idx.size());
}

}  // namespace

ScoreTrainResult train_score_model(const Scenario& sc, std::span<const EpisodeLog> logs,
                                   const ScoreTrainConfig& cfg) {
  if (logs.size() < cfg.min_episodes) {
    throw InsufficientData("train_score_model needs at least " +
                           std::to_string(cfg.min_episodes) + " episodes, got " +
                           std::to_string(logs.size()));
  }
  if (cfg.grid < 1 || cfg.batch_size < 1 || cfg.epochs < 0 || !(cfg.lr > 0.0) ||
      !(cfg.holdout > 0.0 && cfg.holdout < 1.0)) {
    throw std::invalid_argument("train_score_model: invalid config");
  }
  const auto samples = score_samples(sc, logs, cfg.grid);

  // Split by episode so no game contributes to both sides.
  std::vector<std::size_t> episodes(logs.size());
  std::iota(episodes.begin(), episodes.end(), 0);
  Rng rng(derive_seed(cfg.seed, 300));
  for (std::size_t i = episodes.size(); i > 1; --i) {
    std::swap(episodes[i - 1], episodes[uniform_index(rng, i)]);
  }
  const auto n_holdout = static_cast<std::size_t>(
      std::llround(cfg.holdout * static_cast<double>(episodes.size())));
  std::vector<bool> is_holdout(logs.size(), false);
  for (std::size_t i = 0; i < n_holdout; ++i) is_holdout[episodes[i]] = true;

  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (is_holdout[samples[i].episode] ? test_idx : train_idx).push_back(i);
  }
  if (train_idx.empty() || test_idx.empty()) {
    throw InsufficientData("train_score_model: empty train or held-out split");
  }

  double mean = 0.0;
  for (std::size_t i : train_idx) mean += samples[i].target;
  mean /= static_cast<double>(train_idx.size());
  double var = 0.0;
  for (std::size_t i : train_idx) var += (samples[i].target - mean) * (samples[i].target - mean);
  var /= static_cast<double>(train_idx.size());

  ScoreTrainResult result;
  ScorePredictor& p = result.predictor;
  p.behavior = cfg.behavior;
  p.adversary = cfg.adversary;
  p.grid = cfg.grid;
  p.offset = mean;
  p.scale = var > 0.0 ? std::sqrt(var) : 1.0;
  std::vector<int> sizes{static_cast<int>(global_length(cfg.grid))};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(1);
  p.net = Mlp::random(sizes, rng);

  for (std::size_t i : test_idx) {
    result.baseline_mse += (samples[i].target - mean) * (samples[i].target - mean);
  }
  result.baseline_mse /= static_cast<double>(test_idx.size());
  result.train_samples = train_idx.size();
  result.heldout_samples = test_idx.size();

  AdamOptimizer adam;
  std::vector<std::size_t> order = train_idx;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::span<const std::size_t> idx(order.data() + start,
                                             std::min(batch, order.size() - start));
      const Eigen::MatrixXd x = gather(samples, idx, p.net.input_size());
      const Eigen::MatrixXd y = p.net.forward_batch(x);
      Eigen::MatrixXd upstream(1, y.cols());
      for (Eigen::Index k = 0; k < y.cols(); ++k) {
        const double z = (samples[idx[static_cast<std::size_t>(k)]].target - p.offset) / p.scale;
        upstream(0, k) = 2.0 * (y(0, k) - z) / static_cast<double>(y.cols());
      }
      const auto grads = p.net.gradient_batch(x, upstream);
      if (!grads.all_finite()) {
        throw std::runtime_error("train_score_model: non-finite gradient");
      }
      if (cfg.optimizer == "adam") {
        adam.step(p.net, grads, cfg.lr);
      } else {
        sgd_step(p.net, grads, cfg.lr);
      }
    }
    result.mse_curve.push_back(mse(p, samples, test_idx));
  }
  result.heldout_mse = mse(p, samples, test_idx);
  return result;
}

}  // namespace hexwar

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tabaudit/chat.hpp"
#include "tabaudit/dataset.hpp"

namespace tabaudit::llm {

enum class SimulatorKind { Verbatim, Marginal, Learner, Noise };

std::string_view to_string(SimulatorKind kind);
SimulatorKind simulator_from_string(std::string_view text);

inline constexpr std::string_view kRefusal = "I'm sorry, I cannot help with that.";

/// Per-dataset lookup tables shared by the simulators. Building one is
/// O(rows * features); reuse it across calls.
class SimulationContext {
public:
    explicit SimulationContext(const TabularDataset& dataset);

    [[nodiscard]] const TabularDataset& dataset() const noexcept { return dataset_; }
    [[nodiscard]] const std::string& file_text() const noexcept { return file_; }
    [[nodiscard]] std::optional<std::size_t> unique_feature() const noexcept { return unique_; }
    [[nodiscard]] bool is_dataset_row(const std::vector<std::string>& values) const;
    /// Nearest distinct observed value of a numeric feature, or the value
    /// itself when it has no neighbour.
    [[nodiscard]] const std::string& neighbour(std::size_t feature, const std::string& value) const;
    [[nodiscard]] bool perturbable() const noexcept;

private:
    const TabularDataset& dataset_;
    std::string file_;
    std::optional<std::size_t> unique_;
    // per numeric feature: distinct values sorted numerically
    std::vector<std::vector<std::pair<double, std::string>>> ladders_;
    std::unordered_set<std::string> row_keys_;
};

std::string simulate_verbatim(const SimulationContext& context, const ChatRequest& request);
std::string simulate_marginal(const SimulationContext& context, const ChatRequest& request, Rng& rng);
std::string simulate_learner(const SimulationContext& context, const ChatRequest& request, Rng& rng);

std::string simulate_verbatim(const TabularDataset& dataset, const ChatRequest& request);
std::string simulate_marginal(const TabularDataset& dataset, const ChatRequest& request, Rng& rng);
std::string simulate_learner(const TabularDataset& dataset, const ChatRequest& request, Rng& rng);
std::string simulate_noise(const ChatRequest& request);

/// Deterministic oracle model: each call draws from an RNG seeded by the
/// model seed and the canonical request bytes.
class SimulatedModel : public ModelAdapter {
public:
    SimulatedModel(SimulatorKind kind, std::shared_ptr<const TabularDataset> dataset, std::uint64_t seed);

    [[nodiscard]] std::string identity() const override;
    std::string complete(const ChatRequest& request) override;

private:
    SimulatorKind kind_;
    std::shared_ptr<const TabularDataset> dataset_;
    std::uint64_t seed_;
    std::unique_ptr<SimulationContext> context_;
};

}  // namespace tabaudit::llm

#pragma once

// Figure-data CSVs and JSON result documents. Numbers in CSVs use a fixed
// 9-significant-digit format so regression diffs stay stable.

#include "lknet/config.hpp"
#include "lknet/experiment.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace lknet {

[[nodiscard]] std::string format_number(double value);

/// Files written during one command. Unless commit() is called, the
/// destructor removes them again so a failed run leaves no partial output.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);
    ~OutputSet();
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }
    void write_text(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const nlohmann::json& doc);
    void commit() noexcept { committed_ = true; }
    [[nodiscard]] const std::vector<std::filesystem::path>& written() const noexcept { return written_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
    bool committed_ = false;
};

// CSV bodies (header + rows).
[[nodiscard]] std::string trace_csv(const IntensityTrace& trace);
[[nodiscard]] std::string stcc_csv(const std::vector<double>& times, const std::vector<StccSet>& sets);
[[nodiscard]] std::string leader_sweep_csv(const std::vector<LeaderSweepRow>& rows);
[[nodiscard]] std::string selections_csv(const TrialRecord& record);
[[nodiscard]] std::string excess_csv(const TrialRecord& record);
[[nodiscard]] std::string kappa_csv(const TrialRecord& record);
[[nodiscard]] std::string play_stcc_csv(const TrialRecord& record);
/// One CDR column per labelled curve: play,<label>...
[[nodiscard]] std::string cdr_csv(const std::vector<std::string>& labels,
                                  const std::vector<std::vector<double>>& curves);
[[nodiscard]] std::string hyper_sweep_csv(const std::string& parameter, const std::vector<HyperSweepRow>& rows);

// JSON documents; each carries the resolved config (and thus the seed).
[[nodiscard]] nlohmann::json trial_json(const RunConfig& config, const TrialRecord& record);
[[nodiscard]] nlohmann::json experiment_json(const RunConfig& config, const std::vector<TrialSummary>& trials,
                                             const MetricsSummary& metrics);
[[nodiscard]] nlohmann::json metrics_json(const MetricsSummary& metrics);

[[nodiscard]] std::string env_label(const EnvironmentSpec& env);

}  // namespace lknet

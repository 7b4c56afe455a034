#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvs/spectrum.hpp"

namespace rvs::cli {

enum class Command { Classify, Renorm, Lyapunov, Scan, Refine, Mcg, VerifyLemmas };

const char* toString(Command c);

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitLemmas = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --help / --version; carries the text to print.
struct HelpRequested : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Slope parameter given directly: a decimal, p/q, or explicit digits.
struct AlphaArg {
    std::optional<double> value;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> rational;
    std::vector<std::uint64_t> digits;
};

struct RunConfig {
    Command command{Command::Classify};
    std::string repArg;
    Representation rep;
    double thetaLo{0}, thetaHi{0.7853981633974483};
    std::optional<double> theta;  // single slope
    std::optional<AlphaArg> alpha;
    std::size_t gridN{64};
    int depth{8};
    DecisionBudget budget;
    std::uint64_t seed{0};
    std::uint64_t iters{100000};
    int samples{8};
    std::size_t mcgSteps{20};
    int lemmaDraws{100};
    bool chi{true};
    std::string outputPath;  // empty: stdout
    std::string format{"csv"};
};

/// Named representations accepted by --rep.
std::vector<std::string> fixtureNames();
std::optional<Representation> namedFixture(const std::string& name);

/// Throws UsageError (exit 2) or HelpRequested.  argv excludes the program name.
RunConfig parseArgs(const std::vector<std::string>& argv);

void emitScanCSV(const ScanResult& result, std::ostream& out);
void emitScanJSON(const ScanResult& result, std::ostream& out);
void emitRenormJSON(const RenormTrace& trace, std::ostream& out);
/// Parses an emitted renorm document and writes it again.
std::string reemitJSON(const std::string& text);

struct LemmaResult {
    std::string name;
    int draws{0};
    int passed{0};
    double maxResidual{0};
    std::vector<std::string> failures;
    bool ok() const { return draws > 0 && passed == draws; }
};

std::vector<LemmaResult> verifyLemmas(int draws, std::uint64_t seed);

/// Runs a parsed command; the document is written once at the end.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, map exceptions to exit codes.
int runMain(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace rvs::cli

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "narrator/config.hpp"
#include "narrator/time.hpp"

namespace narrator::app {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;        // usage error or unreadable input
inline constexpr int kExitPartialData = 2;  // row-level errors, output still written
inline constexpr int kExitProvider = 3;     // completion provider failed
inline constexpr int kExitParse = 4;        // provider reply did not parse

struct DateRange {
    std::optional<LocalDate> from;  // inclusive
    std::optional<LocalDate> to;    // inclusive
};

// narrate: sensor CSVs -> one narrative file per day under
// <output>/<device>/<date>.txt, plus per-day line counts on stdout.
int cmd_narrate(const RunConfig& cfg, const DateRange& range, std::ostream& out,
                std::ostream& err);

// summarize: daily narrative files -> provider summaries under
// <output>/<device>/summaries/<date>.md.
int cmd_summarize(const RunConfig& cfg, const DateRange& range, std::ostream& out,
                  std::ostream& err);

// predict: summarize each day of the week, assemble the weekly scale
// prompt, parse the reply, write <output>/<device>/predictions/<scale>.txt
// and the raw reply sidecar.
int cmd_predict(const RunConfig& cfg, const std::string& scale, const DateRange& range,
                std::ostream& out, std::ostream& err);

// ask: one literal question, or every bank question of a category, against
// one day's narrative. Replies print to stdout.
int cmd_ask(const RunConfig& cfg, const LocalDate& date, const std::string& question_or_category,
            std::ostream& out, std::ostream& err);

// home: cluster the location table and report the detected home.
int cmd_home(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// questions: export the built-in question bank as category<TAB>question.
int cmd_questions(std::ostream& out);

}  // namespace narrator::app

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "narrator/narrate.hpp"

namespace narrator {

enum class QuestionCategory {
    SmartphoneUsage,
    PhysicalActivity,
    Sleep,
    SignificantEvents,
    Analysis,
};

inline constexpr int kQuestionCategoryCount = 5;

const char* category_name(QuestionCategory c);  // "smartphone_usage", ...
std::optional<QuestionCategory> category_from_name(const std::string& name);

// The built-in question bank, one list per category.
class QuestionBank {
public:
    QuestionBank();

    const std::vector<std::string>& questions(QuestionCategory c) const;
    std::vector<QuestionCategory> categories() const;

    // Plain-text export, one "category<TAB>question" line per question.
    std::string export_tsv() const;

private:
    std::vector<std::vector<std::string>> by_category_;
};

enum class DassSeverity { Normal, Mild, Moderate, Severe, ExtremelySevere };

const char* severity_name(DassSeverity s);  // "Normal", ..., "Extremely Severe"

// Bands partition the non-negative integers: [0,4] [5,6] [7,10] [11,13] [14,inf).
DassSeverity categorize_dass(int score);

enum class PromptKind { DailyQuestion, DailySummary, WeeklyDass, WeeklyPanas };

struct PromptBundle {
    PromptKind kind = PromptKind::DailyQuestion;
    std::string text;
    int token_estimate = 0;  // ceil(bytes / 4)
};

// The ten I-PANAS-SF affects in prompt order.
inline constexpr const char* kPanasAffects[10] = {"Upset",    "Hostile",    "Alert",
                                                  "Ashamed",  "Inspired",   "Nervous",
                                                  "Determined", "Attentive", "Afraid", "Active"};

// The question used to produce daily summaries before weekly aggregation.
inline constexpr const char* kDailySummaryQuestion =
    "Generate a narrative of the day for the person in chronological order.";

using Warnings = std::vector<std::string>;

// Daily-question prompt: instruction block, the question, then the day's
// serialized statements. Throws EmptyNarrative for an empty document.
PromptBundle build_daily_question_prompt(const std::string& question,
                                         const NarrativeDocument& doc, const Timezone& zone,
                                         const std::string& datetime_format =
                                             kDefaultDatetimeFormat);
// Same, over already-serialized statements (as read back from a file).
PromptBundle build_daily_question_prompt(const std::string& question,
                                         const std::string& narrative_text);

PromptBundle build_daily_summary_prompt(const NarrativeDocument& doc, const Timezone& zone,
                                        const std::string& datetime_format =
                                            kDefaultDatetimeFormat);
PromptBundle build_daily_summary_prompt(const std::string& narrative_text);

// Weekly DASS-21 prompt over up to seven daily summaries in day order.
// Fewer than seven raises a warning, zero throws NoSummaries.
PromptBundle build_dass_prompt(const std::vector<std::string>& daily_summaries,
                               Warnings* warnings = nullptr);

// Weekly I-PANAS-SF prompt, same contract.
PromptBundle build_panas_prompt(const std::vector<std::string>& daily_summaries,
                                Warnings* warnings = nullptr);

int estimate_tokens(const std::string& text);

}  // namespace narrator

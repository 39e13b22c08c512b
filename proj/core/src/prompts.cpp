#include "narrator/prompts.hpp"

#include <cmath>

#include "narrator/errors.hpp"

namespace narrator {

namespace {

constexpr const char* kCategoryNames[kQuestionCategoryCount] = {
    "smartphone_usage", "physical_activity", "sleep", "significant_events", "analysis"};

constexpr const char* kDailyHeader =
    "The following data is a chronological list that describes the smartphone sensor events "
    "collected over a day from the smartphone of a university student. The form of each data "
    "record is: timestamp | sensor | description. Answer the following question based on this "
    "data: ";

constexpr const char* kDassHeader =
    "Using the narrative of activities collected from smartphone sensors over the past week, "
    "estimate the individual's mental health based on the DASS-21 scale. This scale evaluates "
    "three subscales: depression, anxiety, and stress, each with a maximum score of 21. For each "
    "subscale, categorize the result into one of the following ranges:\n"
    "Normal: 0 to 4\n"
    "Mild: 5 to 6\n"
    "Moderate: 7 to 10\n"
    "Severe: 11 to 13\n"
    "Extremely Severe: 14 and above\n"
    "\n"
    "Format your output as follows:\n"
    "Depression: <extent>\n"
    "Anxiety: <extent>\n"
    "Stress: <extent>\n"
    "\n"
    "Narratives data: ";

constexpr const char* kPanasHeader =
    "Given a week's narrative of activity collected from smartphone sensors, estimate the scores "
    "for the following affective states that the person would report at the end of the week "
    "using the I-PANAS-SF scale. The scale ranges from 1 to 5, with 1 representing 'Never' and 5 "
    "representing 'Always':\n"
    "\n"
    "Upset\n"
    "Hostile\n"
    "Alert\n"
    "Ashamed\n"
    "Inspired\n"
    "Nervous\n"
    "Determined\n"
    "Attentive\n"
    "Afraid\n"
    "Active\n"
    "\n"
    "Narratives: ";

bool ends_with_punctuation(const std::string& s) {
    if (s.empty()) return false;
    const char c = s.back();
    return c == '.' || c == '?' || c == '!';
}

std::string join_summaries(const std::vector<std::string>& summaries) {
    std::string out;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        if (i) out += "\n\n";
        out += summaries[i];
    }
    return out;
}

void check_summaries(const std::vector<std::string>& summaries, Warnings* warnings,
                     const char* scale) {
    if (summaries.empty()) throw NoSummaries("no daily summaries supplied");
    if (summaries.size() < 7 && warnings)
        warnings->push_back(std::string(scale) + " prompt built from only " +
                            std::to_string(summaries.size()) + " daily summaries (expected 7)");
}

PromptBundle make_bundle(PromptKind kind, std::string text) {
    PromptBundle bundle;
    bundle.kind = kind;
    bundle.token_estimate = estimate_tokens(text);
    bundle.text = std::move(text);
    return bundle;
}

}  // namespace

const char* category_name(QuestionCategory c) { return kCategoryNames[static_cast<int>(c)]; }

std::optional<QuestionCategory> category_from_name(const std::string& name) {
    for (int i = 0; i < kQuestionCategoryCount; ++i)
        if (name == kCategoryNames[i]) return static_cast<QuestionCategory>(i);
    return std::nullopt;
}

QuestionBank::QuestionBank() : by_category_(kQuestionCategoryCount) {
    by_category_[static_cast<int>(QuestionCategory::SmartphoneUsage)] = {
        "What are the peak usage times for the person using smartphones throughout the day?",
        "Did the person spend more time interacting with others (e.g. sending messages or making "
        "calls), or on their own (e.g. watching videos, playing games, etc.) throughout the day?",
        "What activities does the person use the smartphone for? What kind of role did the "
        "smartphone play in the person’s life throughout the day (e.g., working tool, "
        "communication tool, or game device; work-related, social, informational)?",
        "Did the user have any representative behavior, such as frequently changing applications, "
        "unlocking/locking their phone, checking notifications, or frequently scrolling the "
        "application menu?",
        "What is the time distribution of the person using different applications throughout the "
        "day?",
        "What actions did the person do in their social media engagement throughout the day "
        "(e.g. scrolling, posting posts, or giving likes)?",
    };
    by_category_[static_cast<int>(QuestionCategory::PhysicalActivity)] = {
        "How many and what places did the person visit, and what kind of activities did the "
        "person presumably conduct at these locations?",
        "What are the frequently visited places for the person?",
        "Was the visited place crowded or not?",
        "How long did the person spend at home?",
    };
    by_category_[static_cast<int>(QuestionCategory::Sleep)] = {
        "Provide an estimation for how long the person slept.",
        "What patterns emerged regarding the first and last activities before sleep?",
    };
    by_category_[static_cast<int>(QuestionCategory::SignificantEvents)] = {
        kDailySummaryQuestion,
        "What are the minor behaviors that you may notice as a large language model that may not "
        "be evident or obvious when represented with numeric data?",
    };
    by_category_[static_cast<int>(QuestionCategory::Analysis)] = {
        "What can be revealed from the provided data (e.g. the keyboard input the person typed, "
        "the content they browse and preference of browsed topics)? For example, the personality "
        "of the person from their tone when sending messages, or if they initiate or respond to "
        "most calls, the schedules/plans of the person, or the opinion/background of the person?",
        "What would be the highlighted events for the person for the day?",
        "What psychological insights into the person can be provided based on their data for the "
        "day?",
    };
}

const std::vector<std::string>& QuestionBank::questions(QuestionCategory c) const {
    return by_category_[static_cast<int>(c)];
}

std::vector<QuestionCategory> QuestionBank::categories() const {
    std::vector<QuestionCategory> out;
    for (int i = 0; i < kQuestionCategoryCount; ++i)
        out.push_back(static_cast<QuestionCategory>(i));
    return out;
}

std::string QuestionBank::export_tsv() const {
    std::string out;
    for (int i = 0; i < kQuestionCategoryCount; ++i)
        for (const auto& q : by_category_[i]) {
            out += kCategoryNames[i];
            out += '\t';
            out += q;
            out += '\n';
        }
    return out;
}

const char* severity_name(DassSeverity s) {
    switch (s) {
        case DassSeverity::Normal: return "Normal";
        case DassSeverity::Mild: return "Mild";
        case DassSeverity::Moderate: return "Moderate";
        case DassSeverity::Severe: return "Severe";
        case DassSeverity::ExtremelySevere: return "Extremely Severe";
    }
    return "Normal";
}

DassSeverity categorize_dass(int score) {
    if (score < 0) throw NegativeScore("DASS score must be non-negative");
    if (score <= 4) return DassSeverity::Normal;
    if (score <= 6) return DassSeverity::Mild;
    if (score <= 10) return DassSeverity::Moderate;
    if (score <= 13) return DassSeverity::Severe;
    return DassSeverity::ExtremelySevere;
}

int estimate_tokens(const std::string& text) {
    return static_cast<int>((text.size() + 3) / 4);
}

PromptBundle build_daily_question_prompt(const std::string& question,
                                         const std::string& narrative_text) {
    if (question.empty()) throw Error("question must be non-empty");
    if (narrative_text.empty()) throw EmptyNarrative("narrative has no lines");
    std::string text = kDailyHeader + question;
    if (!ends_with_punctuation(question)) text += '.';
    text += "\n\n";
    text += narrative_text;
    return make_bundle(PromptKind::DailyQuestion, std::move(text));
}

PromptBundle build_daily_question_prompt(const std::string& question,
                                         const NarrativeDocument& doc, const Timezone& zone,
                                         const std::string& datetime_format) {
    if (doc.lines.empty())
        throw EmptyNarrative("narrative for " + to_iso(doc.date) + " has no lines");
    return build_daily_question_prompt(question, to_text(doc, zone, datetime_format));
}

PromptBundle build_daily_summary_prompt(const std::string& narrative_text) {
    PromptBundle bundle = build_daily_question_prompt(kDailySummaryQuestion, narrative_text);
    bundle.kind = PromptKind::DailySummary;
    return bundle;
}

PromptBundle build_daily_summary_prompt(const NarrativeDocument& doc, const Timezone& zone,
                                        const std::string& datetime_format) {
    PromptBundle bundle =
        build_daily_question_prompt(kDailySummaryQuestion, doc, zone, datetime_format);
    bundle.kind = PromptKind::DailySummary;
    return bundle;
}

PromptBundle build_dass_prompt(const std::vector<std::string>& daily_summaries,
                               Warnings* warnings) {
    check_summaries(daily_summaries, warnings, "DASS-21");
    return make_bundle(PromptKind::WeeklyDass, kDassHeader + join_summaries(daily_summaries));
}

PromptBundle build_panas_prompt(const std::vector<std::string>& daily_summaries,
                                Warnings* warnings) {
    check_summaries(daily_summaries, warnings, "I-PANAS-SF");
    return make_bundle(PromptKind::WeeklyPanas, kPanasHeader + join_summaries(daily_summaries));
}

}  // namespace narrator

#pragma once

#include <cctype>
#include <map>
#include <string>
#include <string_view>

#include "../errors.hpp"
#include "../kernel/types.hpp"

namespace coopsim::llm {

struct PromptTemplate {
  std::string id;
  std::string body;
};

using Bindings = std::map<std::string, std::string>;

// Replaces every {identifier} with its binding. Bound values are inserted
// verbatim (never re-scanned); braces that do not enclose an identifier are kept.
inline std::string render_prompt(const PromptTemplate& t, const Bindings& bindings) {
  const std::string& s = t.body;
  std::string out;
  out.reserve(s.size() + 64);
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '{') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      const bool ident = j > i + 1 && j < s.size() && s[j] == '}' &&
                         !std::isdigit(static_cast<unsigned char>(s[i + 1]));
      if (ident) {
        const std::string name = s.substr(i + 1, j - i - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw TemplateError(name);
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

namespace templates {

inline const PromptTemplate kKbcScenario{
    "kbc.scenario",
    "You are a college student participating in a number guessing game with other {other_players} players. "
    "You are player #{player_id}.\n"
    "You need to choose a number between 0 and 100. The player whose number is closest to 2/3 of the average "
    "guess of all players wins. Multiple players can win.\n"
    "If only you win, you will earn {reward} credits. If multiple players win, each winner gets {reward} credits."};

inline const PromptTemplate kKbcCommunication{
    "kbc.communication",
    "Discussion so far: '{discussion_context}'\n\n"
    "Before selecting your number, you will discuss the game with other players. You can use these discussions "
    "to formulate a strategy. You can reveal your strategy during the discussion, but you do not have to follow "
    "it when making your final decision.\n"
    "{discussion_instruction}\n"
    "Now it's your turn to speak. Please share your thoughts concisely in one sentence."};

inline const PromptTemplate kKbcPlanning{
    "kbc.planning",
    "Discussion so far: '{discussion_context}'\n\n"
    "{planning_instruction}"
    "Based on the discussion with other players, please choose your number. State your reasoning concisely for "
    "your choice."};

inline const PromptTemplate kKbcAction{"kbc.action", "Choose an integer between 0 and 100."};

inline const PromptTemplate kBcScenario{
    "bc.scenario",
    "This is a game between two players that spans multiple rounds. Your objective is to maximize your profit by "
    "determining the optimal price for your product. You represent a firm called {firm_name}, while the other "
    "player represents a firm called {rival_firm_name}. Do not create or mention any additional firm names, e.g., "
    "do not say anything related to \"AI\" or \"AI assistant/model\".\n\n"
    "In each round, you will be informed of your prices, demands, profits, and the other player's prices in "
    "previous rounds. Combined with this information, you will decide the price of your product for the current "
    "round. Make sure your objective is maximizing your own profit.\n\n"
    "Your profit is (p - c) * q, where p is the price of your product in this round, c (= {firm_cost}) is the "
    "cost of your product, and q is the demand of your product, which is affected by both players' prices in "
    "this round.{persona_instruction}"};

inline const PromptTemplate kBcPlanning{
    "bc.planning",
    "Statistics of historical data (Rounds #a - #b: [your average price, your average demand, your average "
    "profit, the other player's average price]) are given below.\n"
    "{statistics}\n"
    "You are Firm {firm_name}. This is Round #{current_round}.\n"
    "Your strategy in previous rounds: {strategies}\n\n"
    "Based on the above statistics and your previous strategies, what is your strategy for this round?"};

inline const PromptTemplate kBcCommunication{
    "bc.communication",
    "You are Firm {firm_name}. This is Round #{current_round}.\n"
    "Feel free to converse openly with the other player. You may select any topic that could potentially maximize "
    "your profit. Additionally, you are encouraged to ask questions to the other player.\n\n"
    "Conversation so far: {conversations}"};

inline const PromptTemplate kBcAction{
    "bc.action",
    "Conversation this round: {conversations}\n"
    "{statistics}\n"
    "{decision_history_past_20_rounds}\n"
    "{previous_strategies}\n\n"
    "Based on the information you have, please determine the price of your product to maximize your profit.\n"
    "Only reply with a number. Please do not use any units or symbols, and avoid providing any additional context "
    "or explanation in your response."};

inline const PromptTemplate kEeScenario{
    "ee.scenario",
    "Because of an earthquake, you need to escape from the room where you are as quickly as possible. If you "
    "cannot escape in {max_rounds} rounds you will die.\n"
    "The room has a size of {height} * {width}. There are 3 exits in the room. The exits are located at the left, "
    "bottom and right of the room.\n"
    "To escape from the room, you need to consider the following two aspects: exit proximity and people count.\n"
    "The exit proximity is the distance between you and the nearest exit. The people count is the number of "
    "people you can see.\n"
    "We use (x, y) to denote the position, smaller x means top and bigger x means bottom; smaller y means left "
    "and bigger y means right. Position (1, 1) is at the top left of the room. It is possible to move diagonally, "
    "e.g. from (1, 1) to (2, 2) is one move to the lower right, and is faster than (1, 1)->(1, 2)->(2, 2).\n"
    "Each cell can hold only one person at a time.\n"
    "{persona_instruction}"
    "Now you feel: {subjective_feeling}.\n"
    "Here shows you the distances to different exits and the number of people you can see towards those exits: "
    "{exit_overview}"};

inline const PromptTemplate kEeCommunication{
    "ee.communication",
    "You may briefly share information about evacuation with others, such as your feelings, which exit seems to "
    "be the best option for a quick escape, or anything else you would like to deliver. Avoid using numbers in the "
    "communication. Use less than 50 words, not too long."};

inline const PromptTemplate kEePanic{
    "ee.planning.panic",
    "The distance to the nearest exit is {distance}. And there are {number_of_agents} people in your visible "
    "range.\n"
    "Please tell me your feelings about the situation around you in one sentence showing if you are panicking or "
    "not."};

inline const PromptTemplate kEeExitFeelings{
    "ee.planning.exits",
    "Now you feel: {subjective_feeling_on_panic}. Here shows you the distances to different exits and the number "
    "of people you can see towards those exits.\n"
    "{exit_overview}\n\n"
    "Please tell me briefly how will you evaluate the two aspects of each exit based on your personal mental and "
    "physical characteristics in one sentence. Please give 3 sentences for each exit (around 15 words)."};

inline const PromptTemplate kEeDecideExit{
    "ee.action.exit",
    "Now you feel: {subjective_feeling_on_panic}. There are 3 exits in this room. Based on the current situation, "
    "your personal feelings on each exit are: {subjective_feeling_on_exits}\n\n"
    "You hear {number_of_people_communicated} people around you say: {communication}\n\n"
    "Here are the previous decisions you made for the target exit from the beginning: {decision_history}\n"
    "Please tell me which exit you would like to choose to escape, and you always want to escape as quick as "
    "possible. Please use the exit id to indicate your choice.\n"
    "For example, if you want to choose exit left, you can say 'left'. Only output one word of text to indicate "
    "your choice.\n"
    "You can choose from ['bottom', 'left', 'right']. Give your answer without any additional text."};

inline const PromptTemplate kEeDecideMove{
    "ee.action.move",
    "To escape from the room, you have chosen the exit at {exit_id} and you are at {current_pos}.\n"
    "Select your move from these possible options (You can move in cardinal or intercardinal directions, options "
    "with obstacles or other people are excluded and not in the path, and option codes are in random order): "
    "{move_directions_list}.\n"
    "Please tell me your best choice to escape as fast as possible with one single code without any additional "
    "texts."};

// Re-ask prompts sent once after an unparseable answer.
inline constexpr const char* kReaskInteger = "Reply with only an integer between 0 and 100.";
inline constexpr const char* kReaskPrice = "Reply with only a number.";
inline constexpr const char* kReaskExit = "Reply with only one word: bottom, left, or right.";
inline constexpr const char* kReaskMovePrefix = "Reply with only one of these codes: ";

}  // namespace templates

// Persona and instruction text injected into the prompts.
inline std::string kbc_discussion_instruction(Persona p) {
  return p == Persona::ExplicitCooperate
             ? "Feel free to discuss anything, and make cooperation with each other through this discussion."
             : "Feel free to discuss anything, and you do not need to follow other's idea.";
}

inline std::string kbc_planning_instruction(Persona p) {
  switch (p) {
    case Persona::ExplicitCooperate: return "You must cooperate with other players.\n";
    case Persona::Uncooperative: return "You don't like to cooperate with other players.\n";
    default: return "";
  }
}

inline std::string bc_persona_instruction(Persona p) {
  switch (p) {
    case Persona::ExplicitCooperate: return "\n\nYou must cooperate with the other player.";
    case Persona::Uncooperative: return "\n\nYou are selfish and not willing to help others.";
    default: return "";
  }
}

inline std::string ee_persona_instruction(Persona p) {
  switch (p) {
    case Persona::ExplicitCooperate: return "You must cooperate with other people.\n";
    case Persona::Uncooperative: return "You are selfish and not willing to help others.\n";
    default: return "";
  }
}

}  // namespace coopsim::llm

#pragma once

#include <memory>
#include <optional>

#include "../llm/chat.hpp"
#include "../llm/parse.hpp"
#include "../llm/templates.hpp"
#include "../llm/transcript.hpp"
#include "scripted.hpp"

namespace coopsim {

// Agent whose decisions come from a chat model. Each call is stateless on the
// model side: prompts are rendered from the scenario's bindings plus this
// agent's own notes (EE feelings and exit decisions).
class LlmAgent : public Agent {
 public:
  LlmAgent(AgentSpec spec, std::shared_ptr<llm::ChatCompleter> completer, llm::LlmSettings settings,
           llm::CallRecorder* recorder = nullptr)
      : spec_(std::move(spec)), completer_(std::move(completer)), settings_(std::move(settings)), recorder_(recorder) {}

  const AgentSpec& spec() const override { return spec_; }

  std::string communicate(const AgentContext& ctx) override {
    const auto b = bindings(ctx);
    const llm::PromptTemplate* t = ctx.scenario == ScenarioId::KBC  ? &llm::templates::kKbcCommunication
                                   : ctx.scenario == ScenarioId::BC ? &llm::templates::kBcCommunication
                                                                    : &llm::templates::kEeCommunication;
    std::string text = trim(call(ctx, conversation(ctx, b, llm::render_prompt(*t, b))));
    return text.empty() ? std::string("...") : text;
  }

  std::string plan(const AgentContext& ctx) override {
    const auto b = bindings(ctx);
    switch (ctx.scenario) {
      case ScenarioId::KBC: {
        // Strategy and number come back from one call; act() parses it.
        kbc_messages_ = conversation(ctx, b,
                                     llm::render_prompt(llm::templates::kKbcPlanning, b) + "\n" +
                                         llm::render_prompt(llm::templates::kKbcAction, b));
        kbc_reply_ = call(ctx, kbc_messages_);
        return kbc_reply_;
      }
      case ScenarioId::BC:
        return call(ctx, conversation(ctx, b, llm::render_prompt(llm::templates::kBcPlanning, b)));
      case ScenarioId::EE: {
        panic_ = trim(call(ctx, conversation(ctx, b, llm::render_prompt(llm::templates::kEePanic, b))));
        auto b2 = bindings(ctx);
        exit_feelings_ = trim(call(ctx, conversation(ctx, b2, llm::render_prompt(llm::templates::kEeExitFeelings, b2))));
        return "Feeling: " + panic_ + "\nExits: " + exit_feelings_;
      }
    }
    return {};
  }

  AgentAction act(const AgentContext& ctx) override {
    switch (ctx.scenario) {
      case ScenarioId::KBC: return act_kbc(ctx);
      case ScenarioId::BC: return act_bc(ctx);
      case ScenarioId::EE: return act_ee(ctx);
    }
    throw std::logic_error("unknown scenario");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  llm::Bindings bindings(const AgentContext& ctx) const {
    llm::Bindings b(ctx.bindings.begin(), ctx.bindings.end());
    switch (ctx.scenario) {
      case ScenarioId::KBC:
        b["discussion_instruction"] = llm::kbc_discussion_instruction(ctx.persona);
        b["planning_instruction"] = llm::kbc_planning_instruction(ctx.persona);
        break;
      case ScenarioId::BC:
        b["persona_instruction"] = llm::bc_persona_instruction(ctx.persona);
        break;
      case ScenarioId::EE: {
        b["persona_instruction"] = llm::ee_persona_instruction(ctx.persona);
        b["subjective_feeling"] = panic_;
        b["subjective_feeling_on_panic"] = panic_;
        b["subjective_feeling_on_exits"] = exit_feelings_;
        std::string history;
        for (auto e : exit_decisions_) history += (history.empty() ? "" : ", ") + std::string(to_string(e));
        b["decision_history"] = history.empty() ? "none" : history;
        break;
      }
    }
    return b;
  }

  std::vector<llm::ChatMessage> conversation(const AgentContext& ctx, const llm::Bindings& b,
                                             std::string user) const {
    const llm::PromptTemplate* sys = ctx.scenario == ScenarioId::KBC  ? &llm::templates::kKbcScenario
                                     : ctx.scenario == ScenarioId::BC ? &llm::templates::kBcScenario
                                                                      : &llm::templates::kEeScenario;
    return {{"system", llm::render_prompt(*sys, b)}, {"user", std::move(user)}};
  }

  std::string call(const AgentContext& ctx, const std::vector<llm::ChatMessage>& messages) {
    llm::ChatRequest req{settings_.model, messages, settings_.sampling};
    llm::ChatResponse res = completer_->complete(req);
    if (recorder_) recorder_->record({ctx.round, ctx.phase, spec_.id, &req, &res});
    return res.content;
  }

  // Parses `reply`; on failure asks once more with `reask`, then gives up.
  template <typename Parse>
  auto parse_or_reask(const AgentContext& ctx, std::vector<llm::ChatMessage> messages, const std::string& reply,
                      const std::string& reask, Parse parse) -> std::optional<decltype(parse(reply))> {
    try {
      return parse(reply);
    } catch (const ParseFailure&) {
    } catch (const RangeFailure&) {
    }
    messages.push_back({"assistant", reply});
    messages.push_back({"user", reask});
    const std::string second = call(ctx, messages);
    try {
      return parse(second);
    } catch (const ParseFailure&) {
    } catch (const RangeFailure&) {
    }
    return std::nullopt;
  }

  AgentAction act_kbc(const AgentContext& ctx) {
    if (kbc_messages_.empty()) plan(ctx);
    auto choice = parse_or_reask(ctx, kbc_messages_, kbc_reply_, llm::templates::kReaskInteger,
                                 [](const std::string& s) { return llm::parse_integer_choice(s, 0, 100); });
    kbc_messages_.clear();
    if (choice) return {KbcChoice{*choice}};
    return {KbcChoice{levelk_choice(0)}, true};
  }

  AgentAction act_bc(const AgentContext& ctx) {
    const auto b = bindings(ctx);
    auto messages = conversation(ctx, b, llm::render_prompt(llm::templates::kBcAction, b));
    const std::string reply = call(ctx, messages);
    auto price = parse_or_reask(ctx, messages, reply, llm::templates::kReaskPrice,
                                [](const std::string& s) { return llm::parse_price(s); });
    if (price) return {BcPrice{*price}};
    const auto& v = std::get<BcView>(ctx.view);
    if (v.own_last_price) return {BcPrice{*v.own_last_price}, true};
    return {BcPrice{0.5 * (v.params.c + v.refs.p_cartel)}, true};
  }

  AgentAction act_ee(const AgentContext& ctx) {
    const auto& v = std::get<EeView>(ctx.view);
    bool fallback = false;
    ExitId target = v.target.value_or(nearest_exit(v.position, *v.grid));
    if (v.replanning || !v.target) {
      const auto b = bindings(ctx);
      auto messages = conversation(ctx, b, llm::render_prompt(llm::templates::kEeDecideExit, b));
      const std::string reply = call(ctx, messages);
      auto exit = parse_or_reask(ctx, messages, reply, llm::templates::kReaskExit,
                                 [](const std::string& s) { return llm::parse_exit(s); });
      if (exit) {
        target = *exit;
      } else {
        fallback = true;
      }
      exit_decisions_.push_back(target);
    }

    auto b = bindings(ctx);
    b["exit_id"] = to_string(target);
    std::vector<char> codes;
    std::string reask = llm::templates::kReaskMovePrefix;
    for (const auto& o : v.options) {
      reask += (codes.empty() ? "" : ", ") + std::string(1, o.code);
      codes.push_back(o.code);
    }
    reask += ".";
    auto messages = conversation(ctx, b, llm::render_prompt(llm::templates::kEeDecideMove, b));
    const std::string reply = call(ctx, messages);
    auto code = parse_or_reask(ctx, messages, reply, reask,
                               [&](const std::string& s) { return llm::parse_move_code(s, codes); });
    if (!code) return {EeMove{target, 'S'}, true};
    return {EeMove{target, *code}, fallback};
  }

  AgentSpec spec_;
  std::shared_ptr<llm::ChatCompleter> completer_;
  llm::LlmSettings settings_;
  llm::CallRecorder* recorder_;

  std::vector<llm::ChatMessage> kbc_messages_;
  std::string kbc_reply_;
  std::string panic_ = "nothing in particular yet";
  std::string exit_feelings_ = "no impressions yet";
  std::vector<ExitId> exit_decisions_;
};

}  // namespace coopsim

#pragma once

// Offline stand-in for a chat model. Replies are a pure function of (seed,
// request), shaped like what each prompt asks for.

#include <array>
#include <cstdio>
#include <string>

#include "../kernel/rng.hpp"
#include "chat.hpp"

namespace coopsim::llm {

class MockChatModel : public ChatCompleter {
 public:
  explicit MockChatModel(std::uint64_t seed, double garble_rate = 0.0) : seed_(seed), garble_rate_(garble_rate) {}

  ChatResponse complete(const ChatRequest& req) override {
    if (req.messages.empty()) throw std::invalid_argument("chat request has no messages");
    const std::string digest = request_digest(req);
    RngStream rng(seed_ ^ std::stoull(digest.substr(0, 16), nullptr, 16));
    const std::string& prompt = req.messages.back().content;

    ChatResponse out;
    out.finish_reason = "stop";
    out.attempts.push_back({1, 200, {}, 0.0});
    if (rng.bernoulli(garble_rate_)) {
      out.content = "I am not sure what to say.";
      return out;
    }
    out.content = reply(prompt, rng);
    return out;
  }

 private:
  static bool has(const std::string& s, const char* needle) { return s.find(needle) != std::string::npos; }

  static std::string reply(const std::string& prompt, RngStream& rng) {
    if (has(prompt, "Choose an integer between 0 and 100") || has(prompt, "Reply with only an integer")) {
      static constexpr std::array<int, 8> menu{50, 33, 22, 15, 10, 0, 66, 25};
      const int n = rng.bernoulli(0.5) ? menu[rng.uniform_below(menu.size())] : static_cast<int>(rng.uniform_below(101));
      return "Two-thirds of the expected average keeps shrinking, so I aim low.\n" + std::to_string(n);
    }
    if (has(prompt, "determine the price") || has(prompt, "Reply with only a number")) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", 5.5 + 3.0 * rng.uniform01());
      return buf;
    }
    if (has(prompt, "which exit you would like") || has(prompt, "one word: bottom")) {
      static constexpr std::array<const char*, 3> exits{"left", "bottom", "right"};
      return exits[rng.uniform_below(exits.size())];
    }
    if (has(prompt, "Select your move") || has(prompt, "one of these codes")) {
      // Options render as 'X': ...; collect the quoted single letters.
      std::vector<char> codes;
      for (std::size_t i = 0; i + 2 < prompt.size(); ++i) {
        if (prompt[i] == '\'' && std::isupper(static_cast<unsigned char>(prompt[i + 1])) && prompt[i + 2] == '\'') {
          codes.push_back(prompt[i + 1]);
        }
      }
      if (codes.empty()) return "S";
      return std::string(1, codes[rng.uniform_below(codes.size())]);
    }
    if (has(prompt, "panicking")) return rng.bernoulli(0.5) ? "I am calm and focused." : "I am panicking a little.";
    if (has(prompt, "evaluate the two aspects")) return "Each exit looks reachable; the closer one seems best.";
    if (has(prompt, "what is your strategy")) return "Keep prices stable and watch the rival.";
    static constexpr std::array<const char*, 4> chatter{
        "Let's keep things calm and fair.", "I think we should all think carefully.",
        "Following the group seems sensible.", "I will go with my own judgement."};
    return chatter[rng.uniform_below(chatter.size())];
  }

  std::uint64_t seed_;
  double garble_rate_;
};

}  // namespace coopsim::llm

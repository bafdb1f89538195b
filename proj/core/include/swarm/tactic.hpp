#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace swarm {

/// Adversary swarm tactic; the integer value is the class label.
enum class Tactic : int { Greedy = 0, GreedyPlus = 1, Auction = 2, AuctionPlus = 3 };

inline constexpr int kNumTactics = 4;
inline constexpr std::array<Tactic, kNumTactics> kAllTactics = {
    Tactic::Greedy, Tactic::GreedyPlus, Tactic::Auction, Tactic::AuctionPlus};

constexpr int label_of(Tactic t) { return static_cast<int>(t); }
constexpr bool uses_auction(Tactic t) { return t == Tactic::Auction || t == Tactic::AuctionPlus; }
constexpr bool uses_lead_pursuit(Tactic t) { return t == Tactic::GreedyPlus || t == Tactic::AuctionPlus; }

constexpr std::string_view to_string(Tactic t) {
  switch (t) {
    case Tactic::Greedy: return "Greedy";
    case Tactic::GreedyPlus: return "Greedy+";
    case Tactic::Auction: return "Auction";
    case Tactic::AuctionPlus: return "Auction+";
  }
  return "?";
}

/// Open-loop defender motion families.
enum class MotionType : int { Star = 0, Semi = 1, Straight = 2, PerpL = 3, PerpR = 4 };

inline constexpr int kNumMotionTypes = 5;
inline constexpr std::array<MotionType, kNumMotionTypes> kAllMotionTypes = {
    MotionType::Star, MotionType::Semi, MotionType::Straight, MotionType::PerpL, MotionType::PerpR};

constexpr std::string_view to_string(MotionType m) {
  switch (m) {
    case MotionType::Star: return "Star";
    case MotionType::Semi: return "Semi";
    case MotionType::Straight: return "Straight";
    case MotionType::PerpL: return "PerpL";
    case MotionType::PerpR: return "PerpR";
  }
  return "?";
}

/// Case-sensitive match against the names produced by to_string.
std::optional<MotionType> parse_motion_type(std::string_view name);

}  // namespace swarm

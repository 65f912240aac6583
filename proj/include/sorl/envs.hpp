#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sorl/core.hpp"

// Deterministic gridworlds plus the state mapping function F from low-level
// environment states to symbolic states.
namespace sorl::envs {

struct MapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Marker : std::uint8_t {
    kPlain,
    kCoffee,
    kMail,
    kOffice,
    kDecoration,
    kLadder,
    kKey,
    kDoor,
};

struct Cell {
    int x = 0;
    int y = 0;
    bool operator==(const Cell& o) const { return x == o.x && y == o.y; }
};

// Undirected edge between two adjacent cells.
struct Edge {
    Cell a, b;
};

class GridMap {
public:
    static GridMap parse(const std::string& text);  // see parse_map below

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(const Cell& c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }
    Marker label(const Cell& c) const { return cells_[idx(c)]; }
    bool is_wall(const Cell& c) const { return wall_[idx(c)]; }
    // A cell the agent may occupy.
    bool walkable(const Cell& c) const {
        return in_bounds(c) && !is_wall(c) && label(c) != Marker::kDecoration;
    }
    // True when movement between two adjacent cells crosses a wall segment.
    bool wall_between(const Cell& from, const Cell& to) const;
    std::vector<Edge> walls() const;

    std::vector<Cell> cells_with(Marker m) const;
    int count(Marker m) const;

private:
    std::size_t idx(const Cell& c) const {
        return static_cast<std::size_t>(c.y) * width_ + c.x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<Marker> cells_;
    std::vector<char> wall_;
};

// ASCII grid: '#' wall segment, 'C' coffee, 'M' mail, 'O' office,
// '*' decoration, 'K' key, 'D' door, 'L' ladder, '.' plain.
// Rejects ragged rows and unknown glyphs with the offending row/column.
GridMap parse_map(const std::string& text);

enum class Move : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kNumMoves = 4;

using LowState = std::uint32_t;

struct EnvState {
    Cell agent;
    std::uint32_t flags = 0;
    int steps = 0;
    bool terminal = false;
};

struct StepResult {
    EnvState next;
    double reward = 0.0;
    bool terminal = false;
};

// Common surface for both gridworlds. step/map_symbolic are pure functions of
// the passed state, so one instance can serve concurrent rollouts.
class Env {
public:
    virtual ~Env() = default;
    virtual EnvState reset(std::uint64_t seed) const = 0;
    virtual StepResult step(const EnvState& state, Move move) const = 0;
    virtual SymbolicState map_symbolic(const EnvState& state) const = 0;  // the function F
    virtual LowState encode(const EnvState& state) const = 0;
    virtual const VocabPtr& vocab() const = 0;
    virtual int episode_step_cap() const = 0;
};

// Office World: pick up coffee/mail, deliver to the office. Tasks:
//   1 deliver coffee, 2 deliver mail, 3 deliver both (100 per delivery).
class OfficeWorld final : public Env {
public:
    static constexpr std::uint32_t kHasCoffee = 1u << 0;
    static constexpr std::uint32_t kHasMail = 1u << 1;
    static constexpr std::uint32_t kDeliveredCoffee = 1u << 2;
    static constexpr std::uint32_t kDeliveredMail = 1u << 3;

    OfficeWorld(GridMap map, int task, int step_cap = 500);
    static OfficeWorld with_default_map(int task, int step_cap = 500);
    static const char* default_map_text();

    EnvState reset(std::uint64_t seed) const override;
    StepResult step(const EnvState& state, Move move) const override;
    SymbolicState map_symbolic(const EnvState& state) const override;
    LowState encode(const EnvState& state) const override;
    const VocabPtr& vocab() const override { return vocab_; }
    int episode_step_cap() const override { return step_cap_; }

    const GridMap& map() const { return map_; }
    int task() const { return task_; }
    const std::vector<Cell>& legal_starts() const { return starts_; }

private:
    GridMap map_;
    int task_;
    int step_cap_;
    VocabPtr vocab_;
    std::vector<Cell> starts_;
};

// KeyDoorWorld: ladder room with one key (+100) and two doors (+300 with the
// key, terminal). Fixed start on the top platform above the middle ladder.
class KeyDoorWorld final : public Env {
public:
    static constexpr std::uint32_t kHasKey = 1u << 0;
    static constexpr std::uint32_t kDoorOpen = 1u << 1;

    explicit KeyDoorWorld(GridMap map, int step_cap = 2000);
    static KeyDoorWorld with_default_map(int step_cap = 2000);
    static const char* default_map_text();

    EnvState reset(std::uint64_t seed) const override;
    StepResult step(const EnvState& state, Move move) const override;
    SymbolicState map_symbolic(const EnvState& state) const override;
    LowState encode(const EnvState& state) const override;
    const VocabPtr& vocab() const override { return vocab_; }
    int episode_step_cap() const override { return step_cap_; }

    const GridMap& map() const { return map_; }
    Cell start() const { return start_; }

private:
    enum LadderId { kLadderLeft = 0, kLadderMiddle = 1, kLadderRight = 2, kLadderNone = 3 };
    int ladder_of(const Cell& c) const;
    int door_of(const Cell& c) const;  // 0 left, 1 right, -1 none

    GridMap map_;
    int step_cap_;
    VocabPtr vocab_;
    Cell start_;
    std::vector<int> ladder_id_;  // per cell
    std::vector<int> door_id_;    // per cell
};

Cell moved(const Cell& c, Move m);

}  // namespace sorl::envs

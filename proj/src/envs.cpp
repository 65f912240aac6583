#include "sorl/envs.hpp"

#include <algorithm>
#include <sstream>

namespace sorl::envs {

namespace {

Marker glyph_marker(char g) {
    switch (g) {
        case '.': return Marker::kPlain;
        case 'C': return Marker::kCoffee;
        case 'M': return Marker::kMail;
        case 'O': return Marker::kOffice;
        case '*': return Marker::kDecoration;
        case 'L': return Marker::kLadder;
        case 'K': return Marker::kKey;
        case 'D': return Marker::kDoor;
        default:
            throw MapError("unknown glyph");
    }
}

}  // namespace

Cell moved(const Cell& c, Move m) {
    switch (m) {
        case Move::kUp: return {c.x, c.y - 1};
        case Move::kDown: return {c.x, c.y + 1};
        case Move::kLeft: return {c.x - 1, c.y};
        case Move::kRight: return {c.x + 1, c.y};
    }
    return c;
}

GridMap GridMap::parse(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw MapError("empty map");

    GridMap g;
    g.height_ = static_cast<int>(rows.size());
    g.width_ = static_cast<int>(rows[0].size());
    for (std::size_t y = 0; y < rows.size(); ++y) {
        if (static_cast<int>(rows[y].size()) != g.width_) {
            throw MapError("ragged row at row " + std::to_string(y + 1) + ": expected " +
                           std::to_string(g.width_) + " columns, got " +
                           std::to_string(rows[y].size()));
        }
    }
    g.cells_.resize(static_cast<std::size_t>(g.width_) * g.height_, Marker::kPlain);
    g.wall_.assign(g.cells_.size(), 0);
    for (int y = 0; y < g.height_; ++y) {
        for (int x = 0; x < g.width_; ++x) {
            const char c = rows[y][x];
            const Cell cell{x, y};
            if (c == '#') {
                g.wall_[g.idx(cell)] = 1;
                continue;
            }
            try {
                g.cells_[g.idx(cell)] = glyph_marker(c);
            } catch (const MapError&) {
                throw MapError("unknown glyph '" + std::string(1, c) + "' at row " +
                               std::to_string(y + 1) + ", column " + std::to_string(x + 1));
            }
        }
    }
    return g;
}

GridMap parse_map(const std::string& text) { return GridMap::parse(text); }

bool GridMap::wall_between(const Cell& from, const Cell& to) const {
    if (!in_bounds(from) || !in_bounds(to)) return true;
    return is_wall(from) || is_wall(to);
}

std::vector<Edge> GridMap::walls() const {
    std::vector<Edge> out;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Cell c{x, y};
            for (const Cell n : {Cell{x + 1, y}, Cell{x, y + 1}}) {
                if (in_bounds(n) && wall_between(c, n)) out.push_back({c, n});
            }
        }
    }
    return out;
}

std::vector<Cell> GridMap::cells_with(Marker m) const {
    std::vector<Cell> out;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const Cell c{x, y};
            if (!is_wall(c) && label(c) == m) out.push_back(c);
        }
    }
    return out;
}

int GridMap::count(Marker m) const { return static_cast<int>(cells_with(m).size()); }

// ---------------------------------------------------------------------------
// Office World

const char* OfficeWorld::default_map_text() {
    return ".....#......\n"
           ".C...#...M..\n"
           "............\n"
           ".....#......\n"
           "##.###.###.#\n"
           ".....#......\n"
           "..O..#......\n"
           ".*...#..C..*\n"
           ".....#......\n";
}

OfficeWorld OfficeWorld::with_default_map(int task, int step_cap) {
    return OfficeWorld(parse_map(default_map_text()), task, step_cap);
}

OfficeWorld::OfficeWorld(GridMap map, int task, int step_cap)
    : map_(std::move(map)), task_(task), step_cap_(step_cap) {
    if (task_ < 1 || task_ > 3) throw MapError("office task must be 1, 2 or 3");
    if (map_.count(Marker::kCoffee) == 0 || map_.count(Marker::kMail) == 0 ||
        map_.count(Marker::kOffice) == 0) {
        throw MapError("office map needs coffee, mail and office cells");
    }
    vocab_ = make_vocabulary({"at_coffee", "at_mail", "at_office", "has_coffee", "has_mail",
                              "delivered_coffee", "delivered_mail"});
    for (int y = 0; y < map_.height(); ++y) {
        for (int x = 0; x < map_.width(); ++x) {
            const Cell c{x, y};
            if (map_.walkable(c) && map_.label(c) != Marker::kOffice) starts_.push_back(c);
        }
    }
    if (starts_.empty()) throw MapError("office map has no legal start cell");
}

EnvState OfficeWorld::reset(std::uint64_t seed) const {
    std::mt19937 rng(static_cast<std::uint32_t>(seed ^ (seed >> 32)));
    std::uniform_int_distribution<std::size_t> pick(0, starts_.size() - 1);
    EnvState s;
    s.agent = starts_[pick(rng)];
    return s;
}

StepResult OfficeWorld::step(const EnvState& state, Move move) const {
    if (state.terminal) throw std::logic_error("step() on terminal office state");
    EnvState next = state;
    next.steps = state.steps + 1;
    const Cell target = moved(state.agent, move);
    if (map_.walkable(target) && !map_.wall_between(state.agent, target)) {
        next.agent = target;
    }
    double reward = 0.0;
    const Marker m = map_.label(next.agent);
    if (m == Marker::kCoffee && !(next.flags & (kHasCoffee | kDeliveredCoffee)) &&
        next.agent != state.agent) {
        next.flags |= kHasCoffee;
    }
    if (m == Marker::kMail && !(next.flags & (kHasMail | kDeliveredMail)) &&
        next.agent != state.agent) {
        next.flags |= kHasMail;
    }
    if (m == Marker::kOffice && next.agent != state.agent) {
        const bool wants_coffee = task_ == 1 || task_ == 3;
        const bool wants_mail = task_ == 2 || task_ == 3;
        if (wants_coffee && (next.flags & kHasCoffee) && !(next.flags & kDeliveredCoffee)) {
            next.flags = (next.flags & ~kHasCoffee) | kDeliveredCoffee;
            reward += 100.0;
        }
        if (wants_mail && (next.flags & kHasMail) && !(next.flags & kDeliveredMail)) {
            next.flags = (next.flags & ~kHasMail) | kDeliveredMail;
            reward += 100.0;
        }
    }
    bool done = false;
    switch (task_) {
        case 1: done = next.flags & kDeliveredCoffee; break;
        case 2: done = next.flags & kDeliveredMail; break;
        case 3: done = (next.flags & kDeliveredCoffee) && (next.flags & kDeliveredMail); break;
    }
    if (next.steps >= step_cap_) done = true;
    next.terminal = done;
    return {next, reward, done};
}

SymbolicState OfficeWorld::map_symbolic(const EnvState& state) const {
    PropMask bits = 0;
    switch (map_.label(state.agent)) {
        case Marker::kCoffee: bits |= 1u << 0; break;
        case Marker::kMail: bits |= 1u << 1; break;
        case Marker::kOffice: bits |= 1u << 2; break;
        default: break;
    }
    if (state.flags & kHasCoffee) bits |= 1u << 3;
    if (state.flags & kHasMail) bits |= 1u << 4;
    if (state.flags & kDeliveredCoffee) bits |= 1u << 5;
    if (state.flags & kDeliveredMail) bits |= 1u << 6;
    return SymbolicState(vocab_, bits);
}

LowState OfficeWorld::encode(const EnvState& state) const {
    const auto pos = static_cast<LowState>(state.agent.y * map_.width() + state.agent.x);
    return pos | (state.flags << 7);
}

// ---------------------------------------------------------------------------
// KeyDoorWorld

const char* KeyDoorWorld::default_map_text() {
    return "D...........D\n"
           "######L######\n"
           "######L######\n"
           "K.L#......L##\n"
           "##L#######L##\n"
           "##L#######L##\n"
           ".............\n";
}

KeyDoorWorld KeyDoorWorld::with_default_map(int step_cap) {
    return KeyDoorWorld(parse_map(default_map_text()), step_cap);
}

KeyDoorWorld::KeyDoorWorld(GridMap map, int step_cap)
    : map_(std::move(map)), step_cap_(step_cap) {
    vocab_ = make_vocabulary({"at_middle_ladder", "at_left_ladder", "at_right_ladder",
                              "at_right_door", "at_left_door", "key_exists", "has_key",
                              "door_open"});
    if (map_.count(Marker::kKey) != 1) throw MapError("keydoor map needs exactly one key");
    const auto doors = map_.cells_with(Marker::kDoor);
    if (doors.size() != 2) throw MapError("keydoor map needs exactly two doors");

    // Ladder components (4-adjacency), classified left/middle/right by column.
    const auto ladders = map_.cells_with(Marker::kLadder);
    ladder_id_.assign(static_cast<std::size_t>(map_.width()) * map_.height(), kLadderNone);
    std::vector<std::vector<Cell>> comps;
    std::vector<char> seen(ladder_id_.size(), 0);
    auto at = [&](const Cell& c) { return static_cast<std::size_t>(c.y) * map_.width() + c.x; };
    for (const Cell& start : ladders) {
        if (seen[at(start)]) continue;
        std::vector<Cell> comp{start};
        seen[at(start)] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i) {
            for (int m = 0; m < kNumMoves; ++m) {
                const Cell n = moved(comp[i], static_cast<Move>(m));
                if (map_.in_bounds(n) && !map_.is_wall(n) && !seen[at(n)] &&
                    map_.label(n) == Marker::kLadder) {
                    seen[at(n)] = 1;
                    comp.push_back(n);
                }
            }
        }
        comps.push_back(std::move(comp));
    }
    if (comps.size() != 3) throw MapError("keydoor map needs exactly three ladders");
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
        auto min_x = [](const auto& v) {
            int m = v[0].x;
            for (const auto& c : v) m = std::min(m, c.x);
            return m;
        };
        return min_x(a) < min_x(b);
    });
    const int ids[3] = {kLadderLeft, kLadderMiddle, kLadderRight};
    for (int i = 0; i < 3; ++i) {
        for (const Cell& c : comps[i]) ladder_id_[at(c)] = ids[i];
    }

    door_id_.assign(ladder_id_.size(), -1);
    const Cell left_door = doors[0].x < doors[1].x ? doors[0] : doors[1];
    const Cell right_door = doors[0].x < doors[1].x ? doors[1] : doors[0];
    door_id_[at(left_door)] = 0;
    door_id_[at(right_door)] = 1;

    // Fixed start: the walkable cell directly above the middle ladder's top.
    const auto& middle = comps[1];
    Cell top = middle[0];
    for (const Cell& c : middle) {
        if (c.y < top.y) top = c;
    }
    start_ = {top.x, top.y - 1};
    if (!map_.walkable(start_)) throw MapError("no platform above the middle ladder");
}

int KeyDoorWorld::ladder_of(const Cell& c) const {
    return ladder_id_[static_cast<std::size_t>(c.y) * map_.width() + c.x];
}

int KeyDoorWorld::door_of(const Cell& c) const {
    return door_id_[static_cast<std::size_t>(c.y) * map_.width() + c.x];
}

EnvState KeyDoorWorld::reset(std::uint64_t) const {
    EnvState s;
    s.agent = start_;
    return s;
}

StepResult KeyDoorWorld::step(const EnvState& state, Move move) const {
    if (state.terminal) throw std::logic_error("step() on terminal keydoor state");
    EnvState next = state;
    next.steps = state.steps + 1;
    const Cell target = moved(state.agent, move);
    if (map_.walkable(target) && !map_.wall_between(state.agent, target)) {
        next.agent = target;
    }
    double reward = 0.0;
    if (map_.label(next.agent) == Marker::kKey && !(next.flags & kHasKey) &&
        next.agent != state.agent) {
        next.flags |= kHasKey;
        reward += 100.0;
    }
    if (door_of(next.agent) >= 0 && (next.flags & kHasKey) && !(next.flags & kDoorOpen) &&
        next.agent != state.agent) {
        next.flags |= kDoorOpen;
        reward += 300.0;
    }
    bool done = (next.flags & kDoorOpen) || next.steps >= step_cap_;
    next.terminal = done;
    return {next, reward, done};
}

SymbolicState KeyDoorWorld::map_symbolic(const EnvState& state) const {
    PropMask bits = 0;
    switch (ladder_of(state.agent)) {
        case kLadderMiddle: bits |= 1u << 0; break;
        case kLadderLeft: bits |= 1u << 1; break;
        case kLadderRight: bits |= 1u << 2; break;
        default: break;
    }
    const int door = door_of(state.agent);
    if (door == 1) bits |= 1u << 3;
    if (door == 0) bits |= 1u << 4;
    if (!(state.flags & kHasKey)) bits |= 1u << 5;  // key_exists
    if (state.flags & kHasKey) bits |= 1u << 6;
    if (state.flags & kDoorOpen) bits |= 1u << 7;
    return SymbolicState(vocab_, bits);
}

LowState KeyDoorWorld::encode(const EnvState& state) const {
    const auto pos = static_cast<LowState>(state.agent.y * map_.width() + state.agent.x);
    return pos | (state.flags << 7);
}

}  // namespace sorl::envs

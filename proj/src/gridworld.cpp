#include "imlab/gridworld.hpp"

#include "imlab/rng.hpp"

#include <algorithm>
#include <array>

namespace imlab {

namespace {

constexpr std::array<Pos, 4> kDirVec = {{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

Pos dir_vec(Direction d) { return kDirVec[static_cast<std::size_t>(d)]; }

Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}

bool see_behind(const Cell& c) {
  if (c.kind == ObjectKind::Wall) return false;
  if (c.kind == ObjectKind::Door) return c.door_state == DoorState::Open;
  return true;
}

bool walkable(const Cell& c) {
  switch (c.kind) {
    case ObjectKind::Empty:
    case ObjectKind::Floor:
    case ObjectKind::Goal:
      return true;
    case ObjectKind::Door:
      return c.door_state == DoorState::Open;
    default:
      return false;
  }
}

bool can_pickup(const Cell& c) {
  return c.kind == ObjectKind::Key || c.kind == ObjectKind::Ball || c.kind == ObjectKind::Box;
}

Color random_color(Rng& rng) { return static_cast<Color>(rng.index(kNumColors)); }

Color random_color_except(Rng& rng, Color avoid) {
  int c = rng.index(kNumColors - 1);
  if (c >= static_cast<int>(avoid)) ++c;
  return static_cast<Color>(c);
}

}  // namespace

Direction turn_left(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}

Direction turn_right(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}

Pos front_of(Pos p, Direction d) {
  const Pos v = dir_vec(d);
  return {p.x + v.x, p.y + v.y};
}

float success_reward(int step_count, int max_steps) {
  return 1.0f - 0.9f * (static_cast<float>(step_count) / static_cast<float>(max_steps));
}

StateKey state_key(const Observation& obs) {
  return StateKey(reinterpret_cast<const char*>(obs.data.data()), obs.data.size());
}

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

Observation observe(const GridState& s) {
  // View cell (col i, row j): agent sits at (3, 6), facing row-decreasing.
  const Pos f = dir_vec(s.dir);
  const Pos r = dir_vec(turn_right(s.dir));
  std::array<Cell, kViewSize * kViewSize> view;
  for (int j = 0; j < kViewSize; ++j) {
    for (int i = 0; i < kViewSize; ++i) {
      const int wx = s.agent.x + f.x * (6 - j) + r.x * (i - 3);
      const int wy = s.agent.y + f.y * (6 - j) + r.y * (i - 3);
      view[static_cast<std::size_t>(j * kViewSize + i)] =
          s.in_bounds(wx, wy) ? s.at(wx, wy) : Cell::wall();
    }
  }
  // The agent's own cell shows what it carries.
  view[6 * kViewSize + 3] = s.carried.value_or(Cell::empty());

  // Flood visibility from the agent cell; walls and shut doors block.
  std::array<bool, kViewSize * kViewSize> vis{};
  auto at = [&](int i, int j) -> bool& { return vis[static_cast<std::size_t>(j * kViewSize + i)]; };
  auto cell = [&](int i, int j) -> const Cell& {
    return view[static_cast<std::size_t>(j * kViewSize + i)];
  };
  at(3, 6) = true;
  for (int j = kViewSize - 1; j >= 0; --j) {
    for (int i = 0; i < kViewSize - 1; ++i) {
      if (!at(i, j) || !see_behind(cell(i, j))) continue;
      at(i + 1, j) = true;
      if (j > 0) {
        at(i + 1, j - 1) = true;
        at(i, j - 1) = true;
      }
    }
    for (int i = kViewSize - 1; i >= 1; --i) {
      if (!at(i, j) || !see_behind(cell(i, j))) continue;
      at(i - 1, j) = true;
      if (j > 0) {
        at(i - 1, j - 1) = true;
        at(i, j - 1) = true;
      }
    }
  }

  Observation obs;
  for (int j = 0; j < kViewSize; ++j) {
    for (int i = 0; i < kViewSize; ++i) {
      const std::size_t base = static_cast<std::size_t>((j * kViewSize + i) * kObsChannels);
      if (!at(i, j)) continue;  // unseen stays (0, 0, 0)
      const Cell& c = cell(i, j);
      obs.data[base + 0] = static_cast<std::uint8_t>(c.kind);
      obs.data[base + 1] = static_cast<std::uint8_t>(c.color);
      obs.data[base + 2] = c.state_id();
    }
  }
  return obs;
}

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

StepResult step(GridState& s, Action action) {
  if (s.done) throw std::logic_error("step: episode already finished");
  ++s.step_count;
  bool success = false;

  const Pos fwd = front_of(s.agent, s.dir);
  const bool fwd_in = s.in_bounds(fwd.x, fwd.y);

  switch (action) {
    case Action::TurnLeft:
      s.dir = turn_left(s.dir);
      break;
    case Action::TurnRight:
      s.dir = turn_right(s.dir);
      break;
    case Action::Forward:
      if (fwd_in && walkable(s.at(fwd.x, fwd.y))) {
        s.agent = fwd;
        if (s.at(fwd.x, fwd.y).kind == ObjectKind::Goal && s.task == TaskGoal::ReachGoal)
          success = true;
      }
      break;
    case Action::Pickup:
      if (fwd_in && !s.carried && can_pickup(s.at(fwd.x, fwd.y))) {
        s.carried = s.at(fwd.x, fwd.y);
        s.at(fwd.x, fwd.y) = Cell::empty();
        if (s.task == TaskGoal::PickupTarget && s.carried->kind == ObjectKind::Ball &&
            s.carried->color == s.target_color)
          success = true;
      }
      break;
    case Action::Drop:
      if (fwd_in && s.carried && s.at(fwd.x, fwd.y).kind == ObjectKind::Empty) {
        s.at(fwd.x, fwd.y) = *s.carried;
        s.carried.reset();
      }
      break;
    case Action::Toggle:
      if (fwd_in) {
        Cell& c = s.at(fwd.x, fwd.y);
        if (c.kind == ObjectKind::Door) {
          if (c.door_state == DoorState::Locked) {
            if (s.carried && s.carried->kind == ObjectKind::Key && s.carried->color == c.color)
              c.door_state = DoorState::Open;
          } else {
            c.door_state = c.door_state == DoorState::Open ? DoorState::Closed : DoorState::Open;
          }
        } else if (c.kind == ObjectKind::Box) {
          c = c.hidden ? Cell{c.hidden->first, c.hidden->second, DoorState::Open, {}}
                       : Cell::empty();
        }
      }
      break;
    case Action::Done:
      break;
  }

  StepResult res;
  if (success) {
    s.done = true;
    res.done = true;
    res.reward = success_reward(s.step_count, s.max_steps);
  } else if (s.step_count >= s.max_steps) {
    s.done = true;
    res.done = true;
    res.truncated = true;
  }
  res.obs = observe(s);
  return res;
}

StepResult step(GridState& s, int action_id) {
  if (action_id < 0 || action_id >= kNumActions)
    throw std::invalid_argument("step: action id out of range");
  return step(s, static_cast<Action>(action_id));
}

// ---------------------------------------------------------------------------
// MultiRoom generation
// ---------------------------------------------------------------------------

namespace {

struct RoomRect {
  Pos top;
  int size = 0;
  Pos entry;  // door cell on the wall shared with the previous room
};

// Depth-first chain placement with local retries.  `travel` is the direction
// walked through `door` into the room being placed; the room therefore lies
// ahead of the door with the door on its rear wall.
bool place_chain(Rng& rng, int side, int room_size, int n_left, std::vector<RoomRect>& rooms,
                 Direction travel, Pos door) {
  const int s = room_size;
  int tx = 0, ty = 0;
  switch (travel) {
    case Direction::East:
      tx = door.x;
      ty = rng.range(door.y - s + 2, door.y);
      break;
    case Direction::West:
      tx = door.x - s + 1;
      ty = rng.range(door.y - s + 2, door.y);
      break;
    case Direction::South:
      ty = door.y;
      tx = rng.range(door.x - s + 2, door.x);
      break;
    case Direction::North:
      ty = door.y - s + 1;
      tx = rng.range(door.x - s + 2, door.x);
      break;
  }
  if (tx < 0 || ty < 0 || tx + s > side || ty + s > side) return false;
  // No overlap with rooms besides the immediate predecessor (which shares the
  // door wall by construction).
  for (std::size_t k = 0; k + 1 < rooms.size(); ++k) {
    const RoomRect& r = rooms[k];
    const bool apart = tx + s <= r.top.x || r.top.x + r.size <= tx || ty + s <= r.top.y ||
                       r.top.y + r.size <= ty;
    if (!apart) return false;
  }
  rooms.push_back({{tx, ty}, s, door});
  if (n_left == 1) return true;

  for (int attempt = 0; attempt < 8; ++attempt) {
    Direction options[3];
    int n_opt = 0;
    for (int d = 0; d < 4; ++d)
      if (static_cast<Direction>(d) != opposite(travel)) options[n_opt++] = static_cast<Direction>(d);
    const Direction exit_dir = options[rng.index(n_opt)];
    Pos exit_door;
    switch (exit_dir) {
      case Direction::East: exit_door = {tx + s - 1, ty + rng.range(1, s - 1)}; break;
      case Direction::West: exit_door = {tx, ty + rng.range(1, s - 1)}; break;
      case Direction::South: exit_door = {tx + rng.range(1, s - 1), ty + s - 1}; break;
      case Direction::North: exit_door = {tx + rng.range(1, s - 1), ty}; break;
    }
    if (place_chain(rng, side, room_size, n_left - 1, rooms, exit_dir, exit_door)) break;
  }
  return true;
}

Pos random_interior(Rng& rng, const RoomRect& r) {
  return {r.top.x + rng.range(1, r.size - 1), r.top.y + rng.range(1, r.size - 1)};
}

void draw_room_walls(GridState& s, const RoomRect& r) {
  for (int i = 0; i < r.size; ++i) {
    s.at(r.top.x + i, r.top.y) = Cell::wall();
    s.at(r.top.x + i, r.top.y + r.size - 1) = Cell::wall();
    s.at(r.top.x, r.top.y + i) = Cell::wall();
    s.at(r.top.x + r.size - 1, r.top.y + i) = Cell::wall();
  }
}

}  // namespace

GridState generate_multiroom(int n_rooms, int room_size, std::uint64_t seed) {
  if (n_rooms < 2) throw std::invalid_argument("multiroom: need at least 2 rooms");
  if (room_size < 4) throw std::invalid_argument("multiroom: room size must be >= 4");
  const int side = std::min(32, n_rooms * (room_size - 1) + 4);
  if (room_size > side) throw std::invalid_argument("multiroom: room exceeds 32x32 grid bounds");

  Rng rng(seed);
  std::vector<RoomRect> rooms;
  for (int attempt = 0; attempt < 1500 && static_cast<int>(rooms.size()) < n_rooms; ++attempt) {
    rooms.clear();
    const Pos anchor{rng.range(0, side), rng.range(0, side)};
    const auto travel = static_cast<Direction>(rng.index(4));
    place_chain(rng, side, room_size, n_rooms, rooms, travel, anchor);
  }
  if (static_cast<int>(rooms.size()) < n_rooms)
    throw EnvGenerationError("multiroom: no feasible room chain for seed " + std::to_string(seed));

  GridState s;
  s.width = s.height = side;
  s.cells.assign(static_cast<std::size_t>(side) * side, Cell::empty());
  for (const RoomRect& r : rooms) draw_room_walls(s, r);
  int prev_color = -1;
  for (int k = 1; k < n_rooms; ++k) {
    int c;
    if (prev_color < 0) {
      c = rng.index(kNumColors);
    } else {
      c = rng.index(kNumColors - 1);
      if (c >= prev_color) ++c;
    }
    s.at(rooms[static_cast<std::size_t>(k)].entry.x, rooms[static_cast<std::size_t>(k)].entry.y) =
        Cell::door(static_cast<Color>(c), DoorState::Closed);
    prev_color = c;
  }
  s.agent = random_interior(rng, rooms.front());
  s.dir = static_cast<Direction>(rng.index(4));
  const Pos goal = random_interior(rng, rooms.back());
  s.at(goal.x, goal.y) = Cell::goal();

  s.max_steps = 20 * n_rooms;
  s.env_seed = seed;
  s.task = TaskGoal::ReachGoal;
  return s;
}

// ---------------------------------------------------------------------------
// KeyCorridorS3R3
// ---------------------------------------------------------------------------

GridState generate_keycorridor(std::uint64_t seed) {
  Rng rng(seed);
  GridState s;
  s.width = s.height = 7;
  s.cells.assign(49, Cell::wall());

  // 3x3 rooms of size 3 (1x1 interiors); middle column merged into a corridor.
  for (int ry = 0; ry < 3; ++ry)
    for (int rx = 0; rx < 3; ++rx) s.at(2 * rx + 1, 2 * ry + 1) = Cell::empty();
  s.at(3, 2) = Cell::empty();
  s.at(3, 4) = Cell::empty();

  const int locked_row = rng.range(0, 3);
  const int key_row = rng.range(0, 3);

  for (int j = 0; j < 3; ++j)
    s.at(2, 2 * j + 1) = Cell::door(random_color_except(rng, Color::Blue), DoorState::Closed);
  for (int j = 0; j < 3; ++j) {
    s.at(4, 2 * j + 1) = j == locked_row
                             ? Cell::door(Color::Blue, DoorState::Locked)
                             : Cell::door(random_color_except(rng, Color::Blue), DoorState::Closed);
  }
  s.at(1, 2 * key_row + 1) = Cell::key(Color::Blue);
  s.at(5, 2 * locked_row + 1) = Cell::ball(Color::Yellow);

  s.agent = {3, rng.range(1, 6)};
  s.dir = static_cast<Direction>(rng.index(4));

  s.max_steps = 270;
  s.env_seed = seed;
  s.task = TaskGoal::PickupTarget;
  s.target_color = Color::Yellow;
  return s;
}

// ---------------------------------------------------------------------------
// ObstructedMaze2Dlh
// ---------------------------------------------------------------------------

GridState generate_obstructed2dlh(std::uint64_t seed) {
  Rng rng(seed);
  GridState s;
  s.width = 16;
  s.height = 6;
  s.cells.assign(static_cast<std::size_t>(s.width) * s.height, Cell::wall());

  // Three 6x6 rooms in a row sharing wall columns 5 and 10.
  const std::array<int, 3> room_x0 = {1, 6, 11};
  for (int room = 0; room < 3; ++room)
    for (int y = 1; y <= 4; ++y)
      for (int x = room_x0[static_cast<std::size_t>(room)];
           x < room_x0[static_cast<std::size_t>(room)] + 4; ++x)
        s.at(x, y) = Cell::empty();

  const Color left_color = random_color(rng);
  const Color right_color = random_color_except(rng, left_color);
  s.at(5, rng.range(1, 5)) = Cell::door(left_color, DoorState::Locked);
  s.at(10, rng.range(1, 5)) = Cell::door(right_color, DoorState::Locked);

  // Keys hidden in boxes inside the middle room.
  auto middle_cell = [&](int idx) { return Pos{6 + idx % 4, 1 + idx / 4}; };
  const int box_a = rng.index(16);
  int box_b = rng.index(15);
  if (box_b >= box_a) ++box_b;
  const Pos pa = middle_cell(box_a), pb = middle_cell(box_b);
  s.at(pa.x, pa.y) = Cell::box(random_color(rng), ObjectKind::Key, left_color);
  s.at(pb.x, pb.y) = Cell::box(random_color(rng), ObjectKind::Key, right_color);

  // Target ball in one of the side rooms.
  const int side = rng.index(2);
  const Pos ball{room_x0[static_cast<std::size_t>(side == 0 ? 0 : 2)] + rng.index(4),
                 1 + rng.index(4)};
  s.at(ball.x, ball.y) = Cell::ball(Color::Blue);

  // Agent in the middle room on a free cell.
  Pos agent;
  do {
    agent = middle_cell(rng.index(16));
  } while (agent == pa || agent == pb);
  s.agent = agent;
  s.dir = static_cast<Direction>(rng.index(4));

  s.max_steps = 576;
  s.env_seed = seed;
  s.task = TaskGoal::PickupTarget;
  s.target_color = Color::Blue;
  return s;
}

// ---------------------------------------------------------------------------
// Corridor (sanity benchmark)
// ---------------------------------------------------------------------------

GridState generate_corridor(int length, std::uint64_t seed) {
  if (length < 2) throw std::invalid_argument("corridor: length must be >= 2");
  GridState s;
  s.width = length + 2;
  s.height = 3;
  s.cells.assign(static_cast<std::size_t>(s.width) * 3, Cell::wall());
  for (int x = 1; x <= length; ++x) s.at(x, 1) = Cell::empty();
  s.at(length, 1) = Cell::goal();
  s.agent = {1, 1};
  s.dir = Direction::East;
  s.max_steps = 5 * length;
  s.env_seed = seed;
  s.task = TaskGoal::ReachGoal;
  return s;
}

// ---------------------------------------------------------------------------
// Debug rendering
// ---------------------------------------------------------------------------

std::string render_ascii(const GridState& s) {
  std::string out;
  out.reserve(static_cast<std::size_t>((s.width + 1) * s.height));
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      char ch = '?';
      if (s.agent == Pos{x, y}) {
        constexpr char arrows[4] = {'>', 'v', '<', '^'};
        ch = arrows[static_cast<int>(s.dir)];
      } else {
        const Cell& c = s.at(x, y);
        switch (c.kind) {
          case ObjectKind::Empty: ch = '.'; break;
          case ObjectKind::Wall: ch = '#'; break;
          case ObjectKind::Floor: ch = ','; break;
          case ObjectKind::Door:
            ch = c.door_state == DoorState::Open ? '/' : (c.door_state == DoorState::Locked ? 'L' : '+');
            break;
          case ObjectKind::Key: ch = 'k'; break;
          case ObjectKind::Ball: ch = 'o'; break;
          case ObjectKind::Box: ch = 'B'; break;
          case ObjectKind::Goal: ch = 'G'; break;
          case ObjectKind::Unseen: ch = ' '; break;
        }
      }
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace imlab

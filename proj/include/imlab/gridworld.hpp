#ifndef IMLAB_GRIDWORLD_HPP
#define IMLAB_GRIDWORLD_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace imlab {

// Object ids as encoded in observations.  0 is reserved for cells the agent
// cannot see (occluded or out of view).
enum class ObjectKind : std::uint8_t {
  Unseen = 0,
  Empty = 1,
  Wall = 2,
  Floor = 3,
  Door = 4,
  Key = 5,
  Ball = 6,
  Box = 7,
  Goal = 8,
};

enum class Color : std::uint8_t { Red = 0, Green = 1, Blue = 2, Purple = 3, Yellow = 4, Grey = 5 };
inline constexpr int kNumColors = 6;

enum class DoorState : std::uint8_t { Open = 0, Closed = 1, Locked = 2 };

// 0..3 = east, south, west, north; turning right increments.
enum class Direction : std::uint8_t { East = 0, South = 1, West = 2, North = 3 };

struct Pos {
  int x = 0;
  int y = 0;
  bool operator==(const Pos&) const = default;
};

struct Cell {
  ObjectKind kind = ObjectKind::Empty;
  Color color = Color::Red;
  DoorState door_state = DoorState::Open;  // doors only
  // boxes only: what toggling the box reveals
  std::optional<std::pair<ObjectKind, Color>> hidden;

  bool operator==(const Cell&) const = default;

  static Cell empty() { return {}; }
  static Cell wall() { return {ObjectKind::Wall, Color::Grey, DoorState::Open, {}}; }
  static Cell goal() { return {ObjectKind::Goal, Color::Green, DoorState::Open, {}}; }
  static Cell door(Color c, DoorState s) { return {ObjectKind::Door, c, s, {}}; }
  static Cell key(Color c) { return {ObjectKind::Key, c, DoorState::Open, {}}; }
  static Cell ball(Color c) { return {ObjectKind::Ball, c, DoorState::Open, {}}; }
  static Cell box(Color c, ObjectKind inner_kind, Color inner_color) {
    return {ObjectKind::Box, c, DoorState::Open, std::make_pair(inner_kind, inner_color)};
  }

  // Encoded state channel: door state for doors, 0 otherwise.
  std::uint8_t state_id() const {
    return kind == ObjectKind::Door ? static_cast<std::uint8_t>(door_state) : 0;
  }
};

// Actions, in fixed id order.
enum class Action : int {
  TurnLeft = 0,
  TurnRight = 1,
  Forward = 2,
  Pickup = 3,
  Drop = 4,
  Toggle = 5,
  Done = 6,
};
inline constexpr int kNumActions = 7;

inline constexpr int kViewSize = 7;
inline constexpr int kObsChannels = 3;
inline constexpr int kObsSize = kViewSize * kViewSize * kObsChannels;  // 147

// Egocentric 7x7x3 view; data[(row*7+col)*3 + channel], row 6 = agent's row,
// col 3 = agent's column, rows decreasing toward the facing direction.
struct Observation {
  std::array<std::uint8_t, kObsSize> data{};
  bool operator==(const Observation&) const = default;
};

using StateKey = std::string;

// Injective fixed-length serialization of an observation.
StateKey state_key(const Observation& obs);

enum class TaskGoal : std::uint8_t {
  ReachGoal,    // step onto the goal square
  PickupTarget  // pick up the ball of target_color
};

struct GridState {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;  // row-major, y * width + x
  Pos agent;
  Direction dir = Direction::East;
  std::optional<Cell> carried;
  int step_count = 0;
  int max_steps = 0;
  std::uint64_t env_seed = 0;
  TaskGoal task = TaskGoal::ReachGoal;
  Color target_color = Color::Blue;
  bool done = false;

  Cell& at(int x, int y) { return cells[static_cast<std::size_t>(y) * width + x]; }
  const Cell& at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

  bool operator==(const GridState&) const = default;
};

struct StepResult {
  Observation obs;
  float reward = 0.0f;
  bool done = false;
  bool truncated = false;
};

// Thrown when a procedural layout cannot be built for a seed.
class EnvGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chain of n_rooms rooms of room_size x room_size (walls included), joined by
// closed doors of alternating random colors; green goal in the last room.
// max_steps = 20 * n_rooms.  Deterministic in seed.
GridState generate_multiroom(int n_rooms, int room_size, std::uint64_t seed);

// KeyCorridorS3R3: a vertical corridor flanked by 3 rooms per side; a locked
// blue door hides the yellow ball, the blue key sits in a left-hand room.
// max_steps = 270.
GridState generate_keycorridor(std::uint64_t seed);

// ObstructedMaze2Dlh: middle room with two locked side doors whose keys are
// hidden inside boxes; target is the blue ball.  max_steps = 576.
GridState generate_obstructed2dlh(std::uint64_t seed);

// Straight hallway smoke-test environment: agent at the west end facing east,
// goal at the east end, max_steps = 5 * length.
GridState generate_corridor(int length, std::uint64_t seed);

// Applies one action.  All seven actions are legal everywhere (inapplicable
// ones are no-ops that still consume a step).  Throws if the episode is done.
StepResult step(GridState& state, Action action);
StepResult step(GridState& state, int action_id);

// Egocentric partially observable view with flood-fill occlusion.
Observation observe(const GridState& state);

Direction turn_left(Direction d);
Direction turn_right(Direction d);
Pos front_of(Pos p, Direction d);

// Debug renderer.
std::string render_ascii(const GridState& state);

float success_reward(int step_count, int max_steps);

}  // namespace imlab

#endif  // IMLAB_GRIDWORLD_HPP

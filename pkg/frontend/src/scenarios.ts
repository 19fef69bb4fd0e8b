/** Built-in scenarios: a free-play scene, a docking trial, a cross-space
 * drag-and-drop setup, and an occluded-small-object setup. Each scenario is
 * just the messages to send after (re)connecting; all behavior lives in the
 * server. */

import type { SceneDoc, TrialSpecDoc } from "./protocol.js";

export interface Scenario {
  id: string;
  label: string;
  hint: string;
  config: Record<string, unknown>;
  scene: SceneDoc;
  trial?: TrialSpecDoc;
}

const HAND_TO_GAZE_FREEPLAY = {
  technique: "hand_to_gaze",
  // Conceptual model: raising the hand into the gaze line summons without a
  // pinch, which makes the Summoning state easy to observe.
  summon_on_pinch: false,
  hide_far_on_summon: true,
};

const STUDY_DEFAULTS = { technique: "hand_to_gaze", summon_on_pinch: true };

const GAZE_TO_HAND_TOP_VIEW = { technique: "gaze_to_hand" };

function box(
  id: string,
  position: [number, number, number],
  half: [number, number, number],
  interactable = true,
): SceneDoc["objects"][number] {
  return { id, position, half_extents: half, interactable };
}

export const SCENARIOS: Scenario[] = [
  {
    id: "free-play",
    label: "Free play",
    hint:
      "Gaze (pointer) at a box, raise the hand marker (hold H, move, wheel for depth) " +
      "into your gaze line at 0.3-0.5 m to summon; space pinches a proxy.",
    config: HAND_TO_GAZE_FREEPLAY,
    scene: {
      schema: 1,
      eye: [0, 0, 0],
      objects: [
        box("crate", [-0.5, 0.05, 2.2], [0.12, 0.12, 0.12]),
        box("lamp", [-0.28, 0.1, 2.3], [0.06, 0.18, 0.06]),
        box("cart", [0.45, -0.1, 2.6], [0.16, 0.1, 0.1]),
        box("kiosk", [0.75, 0.05, 2.7], [0.1, 0.22, 0.1]),
        box("bench", [0.1, -0.25, 3.2], [0.3, 0.08, 0.1]),
      ],
    },
  },
  {
    id: "docking",
    label: "Docking trial",
    hint:
      "Bring the green cube onto the gray target (within 20% of its width and " +
      "15 degrees) and hold for 300 ms. Summon with an aligned pinch.",
    config: STUDY_DEFAULTS,
    scene: { schema: 1, eye: [0, 0, 0], objects: [] },
    trial: {
      object_size_deg: 12.5,
      rotation_magnitude_deg: 45,
      displacement_dir: "+x",
      axis_pair: "xy",
      seed: 11,
    },
  },
  {
    id: "drag-and-drop",
    label: "Drag and drop",
    hint:
      "Pinch the parcel via gaze, look at your hand to warp it close (top view), " +
      "drag it over the drop zone, release, look away to commit.",
    config: GAZE_TO_HAND_TOP_VIEW,
    scene: {
      schema: 1,
      eye: [0, 0, 0],
      objects: [
        box("parcel", [-0.65, -0.05, 2.4], [0.09, 0.09, 0.09]),
        box("pallet", [-0.42, -0.08, 2.5], [0.12, 0.03, 0.12]),
        box("drop-zone", [0.7, -0.12, 2.8], [0.18, 0.02, 0.18], false),
      ],
    },
  },
  {
    id: "occlusion",
    label: "Occluded + small",
    hint:
      "The note is hidden behind the planter. Pinch the planter, look at your " +
      "hand: the top-view proxy reveals the note for direct grabbing.",
    config: GAZE_TO_HAND_TOP_VIEW,
    scene: {
      schema: 1,
      eye: [0, 0, 0],
      objects: [
        box("planter", [0.1, 0, 2.0], [0.16, 0.2, 0.16]),
        // Directly behind the planter on the same gaze line, and small.
        box("note", [0.1, -0.02, 2.45], [0.04, 0.01, 0.05]),
        box("shelf", [-0.55, 0.1, 2.4], [0.12, 0.25, 0.12]),
      ],
    },
  },
];

export function scenarioById(id: string): Scenario {
  const found = SCENARIOS.find((s) => s.id === id);
  if (!found) throw new Error(`unknown scenario ${id}`);
  return found;
}

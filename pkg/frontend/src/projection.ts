/** Perspective projection for the wireframe renderer: fixed eye at the
 * origin looking along +Z, the same camera the emulated gaze uses. */

import { add, quatRotate, type Quat, type V3 } from "./math.js";
import { HALF_FOV_DEG } from "./emulate.js";

export interface ScreenPoint {
  x: number;
  y: number;
  depth: number;
}

const NEAR_CLIP = 0.05;

/** World point to normalized device coordinates (+y up); null behind camera. */
export function projectPoint(p: V3, aspect = 1): ScreenPoint | null {
  if (p[2] < NEAR_CLIP) return null;
  const tanHalf = Math.tan((HALF_FOV_DEG * Math.PI) / 180);
  return {
    x: p[0] / (p[2] * tanHalf * aspect),
    y: p[1] / (p[2] * tanHalf),
    depth: p[2],
  };
}

/** Apparent NDC radius of a sphere at a world position. */
export function projectRadius(center: V3, radius: number, aspect = 1): number {
  const tanHalf = Math.tan((HALF_FOV_DEG * Math.PI) / 180);
  const depth = Math.max(center[2], NEAR_CLIP);
  return radius / (depth * tanHalf * aspect);
}

const CORNER_SIGNS: V3[] = [
  [-1, -1, -1],
  [1, -1, -1],
  [1, 1, -1],
  [-1, 1, -1],
  [-1, -1, 1],
  [1, -1, 1],
  [1, 1, 1],
  [-1, 1, 1],
];

export const BOX_EDGES: [number, number][] = [
  [0, 1], [1, 2], [2, 3], [3, 0],
  [4, 5], [5, 6], [6, 7], [7, 4],
  [0, 4], [1, 5], [2, 6], [3, 7],
];

/** The eight world-space corners of an oriented box. */
export function boxCorners(position: V3, orientation: Quat, halfExtents: V3): V3[] {
  return CORNER_SIGNS.map((s) =>
    add(
      position,
      quatRotate(orientation, [
        s[0] * halfExtents[0],
        s[1] * halfExtents[1],
        s[2] * halfExtents[2],
      ]),
    ),
  );
}

/** Minimal 3D helpers matching the wire conventions: vectors are [x, y, z],
 * quaternions [w, x, y, z] (Hamilton, active), frame X right / Y up / Z forward. */

export type V3 = [number, number, number];
export type Quat = [number, number, number, number];

export const IDENTITY: Quat = [1, 0, 0, 0];

export function add(a: V3, b: V3): V3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function sub(a: V3, b: V3): V3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function scale(a: V3, s: number): V3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function norm(a: V3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function normalize(a: V3): V3 {
  const n = norm(a);
  if (n === 0) throw new Error("cannot normalize a zero vector");
  return scale(a, 1 / n);
}

export function dot(a: V3, b: V3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function quatRotate(q: Quat, v: V3): V3 {
  const [w, x, y, z] = q;
  const tx = 2 * (y * v[2] - z * v[1]);
  const ty = 2 * (z * v[0] - x * v[2]);
  const tz = 2 * (x * v[1] - y * v[0]);
  return [
    v[0] + w * tx + (y * tz - z * ty),
    v[1] + w * ty + (z * tx - x * tz),
    v[2] + w * tz + (x * ty - y * tx),
  ];
}

export function axisAngle(axis: V3, angleDeg: number): Quat {
  const u = normalize(axis);
  const half = (angleDeg * Math.PI) / 360;
  const s = Math.sin(half);
  return [Math.cos(half), u[0] * s, u[1] * s, u[2] * s];
}

/** Angle in degrees between a ray direction and the direction to a point. */
export function angleBetweenDeg(dir: V3, toPoint: V3): number {
  const d = dot(normalize(dir), normalize(toPoint));
  return (Math.acos(Math.max(-1, Math.min(1, d))) * 180) / Math.PI;
}

/** First hit distance of a ray against a sphere, or null. */
export function raySphere(origin: V3, dir: V3, center: V3, radius: number): number | null {
  const oc = sub(center, origin);
  const proj = dot(oc, dir);
  const closestSq = dot(oc, oc) - proj * proj;
  const radSq = radius * radius;
  if (closestSq > radSq) return null;
  const half = Math.sqrt(radSq - closestSq);
  const t = proj - half >= 0 ? proj - half : proj + half;
  return t >= 0 ? t : null;
}

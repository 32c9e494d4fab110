// Axial hex-cell math mirroring the server grid (pointy-top, origin 0,0),
// used to resolve which stations sit inside a selected globe bin.

const SQRT3 = Math.sqrt(3);

export type HexCell = [number, number];

export function hexCell(lon: number, lat: number, resolution: number): HexCell {
  const q = ((SQRT3 / 3) * lon - lat / 3) / resolution;
  const r = ((2 / 3) * lat) / resolution;
  return cubeRound(q, r);
}

function cubeRound(q: number, r: number): HexCell {
  const x = q;
  const z = r;
  const y = -x - z;
  let rx = Math.round(x);
  const ry = Math.round(y);
  let rz = Math.round(z);
  const dx = Math.abs(rx - x);
  const dy = Math.abs(ry - y);
  const dz = Math.abs(rz - z);
  if (dx > dy && dx > dz) {
    rx = -ry - rz;
  } else if (dy > dz) {
    // y is derived and unused in the returned pair
  } else {
    rz = -rx - ry;
  }
  return [rx, rz];
}

export function sameCell(a: HexCell, b: HexCell): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

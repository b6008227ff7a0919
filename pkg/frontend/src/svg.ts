/** Tiny SVG scene builder — enough for axes, lines, rects and text. */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
  log: boolean;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const f = ((v: number) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.log = false;
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error("logScale: nonpositive domain");
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const f = ((v: number) => r0 + ((Math.log10(v) - l0) / (l1 - l0)) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.log = true;
  return f;
}

export function ticks(scale: Scale, count = 6): number[] {
  const [d0, d1] = scale.domain;
  if (scale.log) {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(d0)); Math.pow(10, e) <= d1 * 1.0001; e++) {
      out.push(Math.pow(10, e));
    }
    return out;
  }
  const span = d1 - d0;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(d0 / s) * s; v <= d1 + s * 1e-9; v += s) {
    out.push(Math.abs(v) < s * 1e-9 ? 0 : v);
  }
  return out;
}

function fmtTick(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return e >= 0 && e <= 3 ? String(Math.pow(10, e)) : `1e${e}`;
  }
  return String(Number(v.toPrecision(6)));
}

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class Figure {
  readonly width: number;
  readonly height: number;
  readonly margin = { left: 64, right: 16, top: 28, bottom: 46 };
  private parts: string[] = [];

  constructor(width = 640, height = 460) {
    this.width = width;
    this.height = height;
  }

  /** pixel range for an x scale */
  xRange(): [number, number] {
    return [this.margin.left, this.width - this.margin.right];
  }

  yRange(): [number, number] {
    return [this.height - this.margin.bottom, this.margin.top];
  }

  add(element: string): void {
    this.parts.push(element);
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string): void {
    this.add(
      `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" ${style}/>`,
    );
  }

  polyline(pts: [number, number][], style: string): void {
    const d = pts.map(([x, y]) => `${r2(x)},${r2(y)}`).join(" ");
    this.add(`<polyline points="${d}" fill="none" ${style}/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.add(
      `<rect x="${r2(x)}" y="${r2(y)}" width="${r2(w)}" height="${r2(h)}" fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, s: string, style = ""): void {
    this.add(`<text x="${r2(x)}" y="${r2(y)}" ${style}>${esc(s)}</text>`);
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string, title = ""): void {
    const [x0, x1] = this.xRange();
    const [y0, y1] = this.yRange();
    const frame = 'stroke="#222" stroke-width="1"';
    this.line(x0, y0, x1, y0, frame);
    this.line(x0, y0, x0, y1, frame);
    for (const t of ticks(xs)) {
      const px = xs(t);
      this.line(px, y0, px, y0 + 5, frame);
      this.text(px, y0 + 20, fmtTick(t, xs.log), 'text-anchor="middle" font-size="12"');
    }
    for (const t of ticks(ys)) {
      const py = ys(t);
      this.line(x0 - 5, py, x0, py, frame);
      this.text(x0 - 8, py + 4, fmtTick(t, ys.log), 'text-anchor="end" font-size="12"');
    }
    const cx = (x0 + x1) / 2;
    this.text(cx, this.height - 8, xLabel, 'text-anchor="middle" font-size="13"');
    this.add(
      `<text x="14" y="${r2((y0 + y1) / 2)}" text-anchor="middle" font-size="13" ` +
        `transform="rotate(-90 14 ${r2((y0 + y1) / 2)})">${esc(yLabel)}</text>`,
    );
    if (title) this.text(cx, 18, title, 'text-anchor="middle" font-size="14" font-weight="bold"');
  }

  /** Empty axes with a centered warning — used when a CSV has no data rows. */
  warning(message: string): void {
    this.text(
      this.width / 2,
      this.height / 2,
      message,
      'text-anchor="middle" font-size="14" fill="#b00" class="warning"',
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
      `font-family="sans-serif">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r2(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

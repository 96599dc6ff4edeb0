// Seven static expressive faces, cross-faded on change.

import { AvatarState, EmotionLabel } from "./types.js";

const FACE_COLORS: Record<EmotionLabel, string> = {
  happy: "#f5c542",
  sad: "#6f9ceb",
  angry: "#e5604c",
  confused: "#b98ad4",
  fearful: "#8fd0c6",
  disgusted: "#9aa84f",
  neutral: "#cfcfcf",
};

function mouthPath(label: EmotionLabel): string {
  switch (label) {
    case "happy":
      return "M 30 62 Q 50 80 70 62";
    case "sad":
      return "M 30 72 Q 50 54 70 72";
    case "angry":
      return "M 32 70 L 68 70";
    case "confused":
      return "M 32 68 Q 42 62 52 68 Q 62 74 70 66";
    case "fearful":
      return "M 42 64 Q 50 74 58 64 Q 50 58 42 64";
    case "disgusted":
      return "M 32 70 Q 50 64 68 72";
    case "neutral":
      return "M 34 68 L 66 68";
  }
}

function browPaths(label: EmotionLabel): [string, string] {
  switch (label) {
    case "angry":
      return ["M 25 32 L 43 40", "M 75 32 L 57 40"];
    case "sad":
      return ["M 25 40 L 43 34", "M 75 40 L 57 34"];
    case "fearful":
      return ["M 26 30 Q 34 24 44 30", "M 56 30 Q 66 24 74 30"];
    case "confused":
      return ["M 25 34 L 43 32", "M 57 28 L 75 36"];
    default:
      return ["M 26 34 L 44 34", "M 56 34 L 74 34"];
  }
}

export function faceSvg(label: EmotionLabel): string {
  const [left, right] = browPaths(label);
  const eyeRy = label === "fearful" || label === "confused" ? 7 : 5;
  return `
<svg viewBox="0 0 100 100" xmlns="http://www.w3.org/2000/svg" role="img" aria-label="${label}">
  <circle cx="50" cy="50" r="46" fill="${FACE_COLORS[label]}" stroke="#333" stroke-width="2"/>
  <ellipse cx="35" cy="46" rx="5" ry="${eyeRy}" fill="#222"/>
  <ellipse cx="65" cy="46" rx="5" ry="${eyeRy}" fill="#222"/>
  <path d="${left}" stroke="#222" stroke-width="3" fill="none" stroke-linecap="round"/>
  <path d="${right}" stroke="#222" stroke-width="3" fill="none" stroke-linecap="round"/>
  <path d="${mouthPath(label)}" stroke="#222" stroke-width="4" fill="none" stroke-linecap="round"/>
</svg>`;
}

export class AvatarView {
  private current: HTMLDivElement;
  private previous: HTMLDivElement;
  private shownState: AvatarState | null = null;

  constructor(private readonly root: HTMLElement) {
    root.classList.add("avatar-stack");
    this.previous = document.createElement("div");
    this.current = document.createElement("div");
    for (const layer of [this.previous, this.current]) {
      layer.classList.add("avatar-layer");
      root.appendChild(layer);
    }
  }

  render(state: AvatarState): void {
    if (
      this.shownState &&
      this.shownState.expression === state.expression &&
      this.shownState.changedAtEventId === state.changedAtEventId
    ) {
      return;
    }
    this.previous.innerHTML = this.current.innerHTML;
    this.previous.classList.remove("fade-in");
    this.current.innerHTML = faceSvg(state.expression);
    this.current.classList.remove("fade-in");
    void this.current.offsetWidth; // restart the CSS transition
    this.current.classList.add("fade-in");
    this.shownState = state;
    this.root.setAttribute("data-expression", state.expression);
  }
}

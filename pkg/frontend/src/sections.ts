import { sectionFromScroll, type SectionNumber } from "./state";

/**
 * Scroll-driven story phases. The active section is recomputed from the
 * scroll offset alone on every scroll event, so scrolling back restores
 * earlier sections exactly; the skip link activates the dashboard phase
 * directly for readers who want the data without the story.
 */
export class ScrollSections {
  private sections: HTMLElement[];
  private onChange: (section: SectionNumber) => void;
  private measureTops: () => number[];
  private active: SectionNumber = 1;

  constructor(
    sections: HTMLElement[],
    onChange: (section: SectionNumber) => void,
    measureTops?: () => number[],
  ) {
    this.sections = sections;
    this.onChange = onChange;
    this.measureTops =
      measureTops ?? (() => this.sections.map((el) => el.offsetTop));
  }

  start(): void {
    window.addEventListener("scroll", () => this.update(), { passive: true });
    window.addEventListener("resize", () => this.update());
    this.update();
  }

  update(): void {
    const section = sectionFromScroll(
      window.scrollY,
      window.innerHeight,
      this.measureTops(),
    );
    this.activate(section);
  }

  activate(section: SectionNumber): void {
    if (section === this.active) return;
    this.active = section;
    this.sections.forEach((el, index) => {
      el.classList.toggle("active", index + 1 === section);
    });
    this.onChange(section);
  }

  get activeSection(): SectionNumber {
    return this.active;
  }

  bindSkipLink(link: HTMLElement): void {
    link.addEventListener("click", () => {
      // jump the viewport if the environment can, switch phase regardless
      this.sections[3]?.scrollIntoView?.({ block: "start" });
      this.activate(4);
    });
  }
}

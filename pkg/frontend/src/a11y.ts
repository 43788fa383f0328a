/** Structural accessibility audit for the rendered app.
 *
 * Checks every interactive element for keyboard reachability and an
 * accessible name, plus landmark and language basics. Hit-target size has
 * no layout engine in tests, so the stylesheet contract (48px minimums on
 * the interactive classes) is audited as text.
 */

export interface Violation {
  severity: "critical" | "minor";
  element: string;
  problem: string;
}

const INTERACTIVE_SELECTOR = "button, a[href], select, input, textarea, [role='button'], [tabindex]";

function describe(element: Element): string {
  const id = element.getAttribute("id") ?? element.getAttribute("data-cell-id") ?? "";
  return `${element.tagName.toLowerCase()}${id ? `#${id}` : ""}.${element.className}`;
}

function accessibleName(element: Element): string {
  return (
    element.getAttribute("aria-label") ??
    element.getAttribute("aria-labelledby") ??
    element.textContent ??
    ""
  ).trim();
}

export function auditAccessibility(root: Document | HTMLElement): Violation[] {
  const violations: Violation[] = [];
  const doc = "documentElement" in root ? root : root.ownerDocument;

  if ("documentElement" in root && !root.documentElement.getAttribute("lang")) {
    violations.push({ severity: "critical", element: "html", problem: "missing lang attribute" });
  }

  for (const element of Array.from(root.querySelectorAll(INTERACTIVE_SELECTOR))) {
    const tabindex = element.getAttribute("tabindex");
    if (tabindex !== null && Number(tabindex) > 0) {
      violations.push({
        severity: "critical",
        element: describe(element),
        problem: "positive tabindex breaks focus order",
      });
    }
    if (tabindex !== null && Number(tabindex) < 0) {
      violations.push({
        severity: "critical",
        element: describe(element),
        problem: "removed from keyboard focus order",
      });
    }
    if (!accessibleName(element)) {
      violations.push({
        severity: "critical",
        element: describe(element),
        problem: "no accessible name",
      });
    }
    if (element.closest("[aria-hidden='true']")) {
      violations.push({
        severity: "critical",
        element: describe(element),
        problem: "interactive element hidden from assistive tech",
      });
    }
  }
  return violations;
}

/** Verify the stylesheet pins the 48px minimum hit target on every
 * interactive class (no layout engine at test time). */
export function auditHitTargets(css: string): Violation[] {
  const violations: Violation[] = [];
  for (const selector of [".cell-button", ".feedback-button", ".language-button", ".detail-select"]) {
    const index = css.indexOf(selector);
    const block = index >= 0 ? css.slice(index, css.indexOf("}", index)) : "";
    const minHeight = /min-height:\s*(\d+)px/.exec(block);
    const minWidth = /min-width:\s*(\d+)px/.exec(block);
    if (!minHeight || Number(minHeight[1]) < 48 || !minWidth || Number(minWidth[1]) < 48) {
      violations.push({
        severity: "critical",
        element: selector,
        problem: "hit target under 48px",
      });
    }
  }
  return violations;
}

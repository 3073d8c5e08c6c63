/** Stable 48-bit seeds from string/number keys (sha256-based).
 *
 * 48 bits keeps seeds inside JavaScript's safe-integer range so they
 * survive the JSON wire format exactly.
 */

import { createHash } from 'node:crypto';

export function stableSeed48(...parts: (string | number)[]): number {
  const digest = createHash('sha256').update(parts.join('|')).digest();
  return digest.readUIntBE(0, 6);
}

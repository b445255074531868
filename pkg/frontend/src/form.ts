import type { Axes, FilterChoice, QueryBody, SchemaResponse } from './types.js'

const STORAGE_KEY = 'phonolex-console-form'

// Everything the query form holds, plus enough bookkeeping to know when it
// diverged from the last submission. Serializes losslessly to the
// /api/query body.
export interface FormState {
    display: string                       // "count" or space-separated attributes
    patterns: Record<string, string>      // attribute -> pattern source ("" = off)
    projections: Record<string, string>
    loanwords: FilterChoice
    suffixed: FilterChoice
    phrases: FilterChoice
    timeLimit: number
    axes: Axes
    vars: string
    dirty: boolean
    lastSubmitted: string | null          // JSON.stringify of the last body
}

export function defaultState(schema: SchemaResponse): FormState {
    const defaults = schema.default_form
    const patterns: Record<string, string> = {}
    const projections: Record<string, string> = {}
    for (const field of schema.fields) {
        patterns[field.attribute] = defaults.patterns[field.attribute] ?? ''
        projections[field.attribute] = defaults.projections[field.attribute] ?? ''
    }
    return {
        display: displayText(defaults.display),
        patterns,
        projections,
        loanwords: defaults.loanwords,
        suffixed: defaults.suffixed,
        phrases: defaults.phrases,
        timeLimit: defaults.time_limit,
        axes: defaults.axes,
        vars: defaults.vars,
        dirty: false,
        lastSubmitted: null,
    }
}

export function displayText(display: 'count' | string[]): string {
    return display === 'count' ? 'count' : display.join(' ')
}

export function serializeBody(state: FormState): QueryBody {
    const trimmed = state.display.trim()
    const display: 'count' | string[] =
        trimmed === 'count' || trimmed === '' ? 'count' : trimmed.split(/\s+/)
    const patterns: Record<string, string> = {}
    for (const [attribute, source] of Object.entries(state.patterns)) {
        if (source.trim() !== '') patterns[attribute] = source
    }
    const projections: Record<string, string> = {}
    for (const [attribute, source] of Object.entries(state.projections)) {
        if (source.trim() !== '') projections[attribute] = source
    }
    return {
        display,
        patterns,
        projections,
        loanwords: state.loanwords,
        suffixed: state.suffixed,
        phrases: state.phrases,
        time_limit: state.timeLimit,
        axes: state.axes,
        vars: state.vars,
    }
}

export function applyBody(state: FormState, body: QueryBody): FormState {
    const next = { ...state, patterns: { ...state.patterns }, projections: { ...state.projections } }
    next.display = displayText(body.display)
    for (const attribute of Object.keys(next.patterns)) {
        next.patterns[attribute] = body.patterns[attribute] ?? ''
    }
    for (const attribute of Object.keys(next.projections)) {
        next.projections[attribute] = body.projections[attribute] ?? ''
    }
    next.loanwords = body.loanwords
    next.suffixed = body.suffixed
    next.phrases = body.phrases
    next.timeLimit = body.time_limit
    next.axes = body.axes
    next.vars = body.vars
    return next
}

export function markSubmitted(state: FormState): void {
    state.lastSubmitted = JSON.stringify(serializeBody(state))
    state.dirty = false
}

export function isUnchangedSinceSubmit(state: FormState): boolean {
    return state.lastSubmitted !== null
        && state.lastSubmitted === JSON.stringify(serializeBody(state))
}

interface StorageLike {
    getItem(key: string): string | null
    setItem(key: string, value: string): void
}

// field sessions survive reloads: the last edited form comes back
export function saveState(state: FormState, storage: StorageLike): void {
    storage.setItem(STORAGE_KEY, JSON.stringify(serializeBody(state)))
}

export function restoreState(state: FormState, storage: StorageLike): FormState {
    const raw = storage.getItem(STORAGE_KEY)
    if (raw === null) return state
    try {
        return applyBody(state, JSON.parse(raw) as QueryBody)
    } catch {
        return state
    }
}

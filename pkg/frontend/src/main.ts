import { ApiClient, QueryRejected } from './api.js'
import { AudioChannel } from './audio.js'
import {
    FormState,
    defaultState,
    isUnchangedSinceSubmit,
    markSubmitted,
    restoreState,
    saveState,
    serializeBody,
} from './form.js'
import { renderTable } from './table.js'
import type { QueryIssue, SchemaResponse } from './types.js'

export interface ConsoleDeps {
    api?: ApiClient
    audio?: AudioChannel
    storage?: Storage
    document?: Document
}

// One page: the editable query form on the left of the results. All
// validation comes back from the server and lands inline on the row it
// concerns; the form keeps its state across submissions and reloads.
export class QueryConsole {
    readonly api: ApiClient
    readonly audio: AudioChannel
    private storage: Storage | null
    private doc: Document
    state!: FormState
    schema!: SchemaResponse

    banner!: HTMLElement
    form!: HTMLFormElement
    results!: HTMLElement
    status!: HTMLElement
    submitButton!: HTMLButtonElement
    private patternInputs = new Map<string, HTMLInputElement>()
    private projectionInputs = new Map<string, HTMLInputElement>()
    private errorSlots = new Map<string, HTMLElement>()
    private formError!: HTMLElement

    constructor(private root: HTMLElement, deps: ConsoleDeps = {}) {
        this.api = deps.api ?? new ApiClient()
        this.audio = deps.audio ?? new AudioChannel()
        this.storage = deps.storage ?? (typeof localStorage === 'undefined' ? null : localStorage)
        this.doc = deps.document ?? document
    }

    async start(): Promise<void> {
        this.buildSkeleton()
        try {
            this.schema = await this.api.getSchema()
        } catch (error) {
            this.showBanner(`cannot reach the lexicon service: ${String(error)}`)
            return
        }
        this.state = defaultState(this.schema)
        if (this.storage !== null) {
            this.state = restoreState(this.state, this.storage)
        }
        this.buildForm()
    }

    private buildSkeleton(): void {
        this.root.innerHTML = ''
        this.banner = this.el('div', 'banner hidden')
        this.form = this.doc.createElement('form')
        this.form.className = 'query-form'
        this.status = this.el('div', 'status')
        this.results = this.el('div', 'results-pane')
        this.root.append(this.banner, this.form, this.status, this.results)
    }

    private el(tag: string, className: string): HTMLElement {
        const node = this.doc.createElement(tag)
        node.className = className
        return node
    }

    private showBanner(message: string): void {
        this.banner.textContent = message
        this.banner.classList.remove('hidden')
    }

    buildForm(): void {
        const doc = this.doc
        this.form.innerHTML = ''
        this.patternInputs.clear()
        this.projectionInputs.clear()
        this.errorSlots.clear()

        const displayRow = this.el('div', 'row display-row')
        displayRow.append(this.label('display'),
                          this.textInput('display', this.state.display, value => {
                              this.state.display = value
                          }))
        this.form.appendChild(displayRow)

        const attributeTable = this.el('div', 'attributes')
        for (const field of this.schema.fields) {
            const row = this.el('div', 'row attribute-row')
            row.dataset.attribute = field.attribute
            const pattern = this.textInput(
                `pattern-${field.attribute}`,
                this.state.patterns[field.attribute] ?? '',
                value => { this.state.patterns[field.attribute] = value },
            )
            const projection = this.textInput(
                `proj-${field.attribute}`,
                this.state.projections[field.attribute] ?? '',
                value => { this.state.projections[field.attribute] = value },
            )
            projection.classList.add('projection')
            const error = this.el('span', 'inline-error hidden')
            this.patternInputs.set(field.attribute, pattern)
            this.projectionInputs.set(field.attribute, projection)
            this.errorSlots.set(field.attribute, error)
            row.append(this.label(field.attribute), pattern, projection, error)
            attributeTable.appendChild(row)
        }
        this.form.appendChild(attributeTable)

        for (const name of ['loanwords', 'suffixed', 'phrases'] as const) {
            const row = this.el('div', 'row filter-row')
            const select = doc.createElement('select')
            select.name = name
            for (const choice of ['include', 'exclude']) {
                const option = doc.createElement('option')
                option.value = choice
                option.textContent = choice
                select.appendChild(option)
            }
            select.value = this.state[name]
            select.addEventListener('change', () => {
                this.state[name] = select.value as 'include' | 'exclude'
                this.touched()
            })
            row.append(this.label(name), select)
            this.form.appendChild(row)
        }

        const limitRow = this.el('div', 'row')
        const limit = this.textInput('time-limit', String(this.state.timeLimit), value => {
            const parsed = Number(value)
            if (Number.isFinite(parsed) && parsed > 0) this.state.timeLimit = parsed
        })
        limitRow.append(this.label('time limit (s)'), limit)
        this.form.appendChild(limitRow)

        const axesRow = this.el('div', 'row')
        const axes = doc.createElement('select')
        axes.name = 'axes'
        for (const choice of ['normal', 'flip']) {
            const option = doc.createElement('option')
            option.value = choice
            option.textContent = choice
            axes.appendChild(option)
        }
        axes.value = this.state.axes
        axes.addEventListener('change', () => {
            this.state.axes = axes.value as 'normal' | 'flip'
            this.touched()
        })
        axesRow.append(this.label('axes'), axes)
        this.form.appendChild(axesRow)

        const varsRow = this.el('div', 'row vars-row')
        const vars = doc.createElement('textarea')
        vars.name = 'vars'
        vars.rows = 10
        vars.value = this.state.vars
        vars.addEventListener('input', () => {
            this.state.vars = vars.value
            this.touched()
        })
        varsRow.append(this.label('vars'), vars)
        this.form.appendChild(varsRow)

        this.formError = this.el('div', 'inline-error form-error hidden')
        this.form.appendChild(this.formError)

        this.submitButton = doc.createElement('button')
        this.submitButton.type = 'submit'
        this.submitButton.textContent = 'Run query'
        this.form.appendChild(this.submitButton)
        this.form.addEventListener('submit', event => {
            event.preventDefault()
            void this.submit()
        })
    }

    private label(text: string): HTMLElement {
        const node = this.el('span', 'field-label')
        node.textContent = text
        return node
    }

    private textInput(name: string, value: string,
                      onInput: (value: string) => void): HTMLInputElement {
        const input = this.doc.createElement('input')
        input.type = 'text'
        input.name = name
        input.value = value
        input.addEventListener('input', () => {
            onInput(input.value)
            this.touched()
        })
        return input
    }

    private touched(): void {
        this.state.dirty = true
        if (this.storage !== null) saveState(this.state, this.storage)
    }

    clearErrors(): void {
        for (const slot of this.errorSlots.values()) {
            slot.textContent = ''
            slot.classList.add('hidden')
        }
        this.formError.textContent = ''
        this.formError.classList.add('hidden')
    }

    showIssues(issues: QueryIssue[]): void {
        for (const issue of issues) {
            const slot = issue.attribute !== null
                ? this.errorSlots.get(issue.attribute) : undefined
            const where = issue.position !== null ? ` (column ${issue.position})` : ''
            if (slot !== undefined) {
                slot.textContent = issue.message + where
                slot.classList.remove('hidden')
            } else {
                this.formError.textContent =
                    `${issue.attribute ?? 'form'}: ${issue.message}${where}`
                this.formError.classList.remove('hidden')
            }
        }
    }

    // one query in flight at a time; the table only changes on success
    async submit(): Promise<void> {
        if (this.submitButton.disabled) return
        this.submitButton.disabled = true
        this.clearErrors()
        try {
            const body = serializeBody(this.state)
            const response = await this.api.postQuery(body)
            markSubmitted(this.state)
            this.status.textContent = `${response.matched_count} records matched`
                + (response.truncated ? ' — time limit reached, results truncated' : '')
            this.status.classList.toggle('warning', response.truncated)
            this.results.innerHTML = ''
            this.results.appendChild(renderTable(response.table, {
                audio: this.audio,
                document: this.doc,
            }))
            for (const note of response.diagnostics) {
                const div = this.el('div', 'diagnostic')
                div.textContent = note
                this.results.appendChild(div)
            }
        } catch (error) {
            if (error instanceof QueryRejected) {
                this.showIssues(error.issues.errors)
            } else {
                this.showBanner(`query failed: ${String(error)}`)
            }
        } finally {
            this.submitButton.disabled = false
        }
    }

    resubmitWouldRepeat(): boolean {
        return isUnchangedSinceSubmit(this.state)
    }
}

export async function initConsole(root: HTMLElement, deps: ConsoleDeps = {}): Promise<QueryConsole> {
    const console_ = new QueryConsole(root, deps)
    await console_.start()
    return console_
}

declare global {
    interface Window { phonolexConsole?: QueryConsole }
}

if (typeof window !== 'undefined' && typeof document !== 'undefined'
        && document.getElementById('console-root') !== null) {
    void initConsole(document.getElementById('console-root') as HTMLElement)
        .then(instance => { window.phonolexConsole = instance })
}
